"""Program model: numbered total/partial programs over N with step budgets.

Four term constructors cover every hypothesis shape the simulator needs:

* ``EventuallyConstant(prefix, tail)`` -- a binary word followed by a
  constant tail; structurally total.
* ``Threshold(kind, cut)`` -- step functions on N, or on Z embedded into N
  by the zig-zag bijection 0,1,-1,2,-2,...; structurally total.
* ``FiniteTable(entries, default)`` -- finitely many exceptions to a
  default label; structurally total, and the only constructor whose values
  may exceed {0,1} (multi-color hypotheses; those sit outside the numbering).
* ``Machine(stmts)`` -- a while-program over natural registers; carries no
  totality guarantee and is evaluated under an explicit step budget.

``encode``/``decode`` give a bijection between binary-valued terms and N,
built from a tagged Cantor pairing. ``eval_bounded`` is the budgeted
evaluation: run the program for at most ``s`` steps and report ``halted``
or ``running``; it is monotone and value-stable in ``s``.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Optional, Union

import numpy as np

from . import backend, _pykernels

DEFAULT_FUEL = 1_000_000

# registers beyond this route machine evaluation to the python kernel,
# whose register file is unbounded
_COMPILED_MAX_REGS = 64


class FuelExhausted(Exception):
    """A machine-backed evaluation did not halt within its step budget."""

    def __init__(self, budget, where=""):
        self.budget = budget
        super().__init__(f"no halt within {budget} steps{' at ' + where if where else ''}")


# ---------------------------------------------------------------------------
# pairing and base codes


def pair(a: int, b: int) -> int:
    """Cantor pairing N x N -> N."""
    t = a + b
    return t * (t + 1) // 2 + b


def unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def word_to_nat(w: str) -> int:
    """Bijective code for binary words: '' -> 0, '0' -> 1, '1' -> 2, '00' -> 3, ..."""
    return int("1" + w, 2) - 1


def nat_to_word(n: int) -> str:
    return bin(n + 1)[3:]


def nat_to_int(n: int) -> int:
    """Zig-zag bijection N -> Z: 0,1,-1,2,-2,..."""
    return (n + 1) // 2 if n & 1 else -(n // 2)


def int_to_nat(z: int) -> int:
    return 2 * z - 1 if z > 0 else -2 * z


def _list_encode(items) -> int:
    code = 0
    for h in reversed(items):
        code = pair(h, code) + 1
    return code


def _list_decode(code: int) -> list[int]:
    out = []
    while code:
        h, code = unpair(code - 1)
        out.append(h)
    return out


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Inc:
    reg: int


@dataclass(frozen=True)
class Dec:
    reg: int


@dataclass(frozen=True)
class While:
    reg: int
    body: tuple


Stmt = Union[Inc, Dec, While]


@dataclass(frozen=True)
class EventuallyConstant:
    prefix: str
    tail: int


@dataclass(frozen=True)
class Threshold:
    kind: str  # 'nat' or 'int'
    cut: int

    def __post_init__(self):
        if self.kind not in ("nat", "int"):
            raise ValueError("threshold kind must be 'nat' or 'int'")
        if self.kind == "nat" and self.cut < 0:
            raise ValueError("nat threshold cut must be >= 0")


@dataclass(frozen=True)
class FiniteTable:
    entries: tuple  # ((x, value), ...) sorted by x, distinct keys
    default: int = 0

    def __post_init__(self):
        entries = tuple(sorted(self.entries))
        keys = [x for x, _ in entries]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate table keys")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, table: dict, default: int = 0) -> "FiniteTable":
        return cls(tuple(table.items()), default)

    def lookup(self, x: int) -> int:
        for k, v in self.entries:
            if k == x:
                return v
        return self.default


@dataclass(frozen=True)
class Machine:
    stmts: tuple


ProgramTerm = Union[EventuallyConstant, Threshold, FiniteTable, Machine]


def singleton_table(p: int) -> FiniteTable:
    """The function labeling exactly ``p`` with 1."""
    return FiniteTable(((p, 1),), 0)


# ---------------------------------------------------------------------------
# numbering

_TAG_EC, _TAG_TH, _TAG_FT, _TAG_MACH = 0, 1, 2, 3


def _encode_stmt(st: Stmt) -> int:
    if isinstance(st, Inc):
        return 3 * st.reg
    if isinstance(st, Dec):
        return 3 * st.reg + 1
    if isinstance(st, While):
        return 3 * pair(st.reg, _list_encode([_encode_stmt(s) for s in st.body])) + 2
    raise TypeError(f"not a statement: {st!r}")


def _decode_stmt(code: int) -> Stmt:
    tag, payload = code % 3, code // 3
    if tag == 0:
        return Inc(payload)
    if tag == 1:
        return Dec(payload)
    reg, body = unpair(payload)
    return While(reg, tuple(_decode_stmt(c) for c in _list_decode(body)))


def _require_bit(v: int, what: str) -> int:
    if v not in (0, 1):
        raise ValueError(f"{what} must be a bit, got {v!r}")
    return v


def encode(term: ProgramTerm) -> int:
    """Bijective index of a binary-valued term."""
    if isinstance(term, EventuallyConstant):
        _require_bit(term.tail, "tail")
        if any(c not in "01" for c in term.prefix):
            raise ValueError("prefix must be a binary word")
        payload = 2 * word_to_nat(term.prefix) + term.tail
        return 4 * payload + _TAG_EC
    if isinstance(term, Threshold):
        c = term.cut if term.kind == "nat" else int_to_nat(term.cut)
        payload = 2 * c + (0 if term.kind == "nat" else 1)
        return 4 * payload + _TAG_TH
    if isinstance(term, FiniteTable):
        _require_bit(term.default, "default")
        codes = []
        prev = -1
        for k, v in term.entries:
            _require_bit(v, "table value")
            codes.append(2 * (k - prev - 1) + v)
            prev = k
        payload = 2 * _list_encode(codes) + term.default
        return 4 * payload + _TAG_FT
    if isinstance(term, Machine):
        return 4 * _list_encode([_encode_stmt(s) for s in term.stmts]) + _TAG_MACH
    raise TypeError(f"not a program term: {term!r}")


def decode(e: int) -> ProgramTerm:
    """Inverse of :func:`encode`; defined for every natural number."""
    if e < 0:
        raise ValueError("program indices are naturals")
    tag, payload = e % 4, e // 4
    if tag == _TAG_EC:
        return EventuallyConstant(nat_to_word(payload // 2), payload % 2)
    if tag == _TAG_TH:
        c, kindbit = payload // 2, payload % 2
        return Threshold("nat", c) if kindbit == 0 else Threshold("int", nat_to_int(c))
    if tag == _TAG_FT:
        default = payload % 2
        entries = []
        prev = -1
        for code in _list_decode(payload // 2):
            gap, v = code // 2, code % 2
            k = prev + 1 + gap
            entries.append((k, v))
            prev = k
        return FiniteTable(tuple(entries), default)
    return Machine(tuple(_decode_stmt(c) for c in _list_decode(payload)))


def make_eventually_constant(alpha: str, i: int) -> int:
    """Index of the total program computing ``alpha`` followed by ``i`` forever."""
    return encode(EventuallyConstant(alpha, i))


# ---------------------------------------------------------------------------
# machine compilation and evaluation

_OP_INC, _OP_DEC, _OP_JZ, _OP_JMP, _OP_HALT = 0, 1, 2, 3, 4


@lru_cache(maxsize=512)
def _compiled(m: Machine) -> tuple[tuple[int, ...], int]:
    code: list[int] = []
    max_reg = 1  # register 0 is input, register 1 is output

    def emit(stmts):
        nonlocal max_reg
        for st in stmts:
            max_reg = max(max_reg, st.reg)
            if isinstance(st, Inc):
                code.extend((_OP_INC, st.reg, 0))
            elif isinstance(st, Dec):
                code.extend((_OP_DEC, st.reg, 0))
            elif isinstance(st, While):
                top = len(code)
                code.extend((_OP_JZ, st.reg, -1))
                emit(st.body)
                code.extend((_OP_JMP, top, 0))
                code[top + 2] = len(code)
            else:
                raise TypeError(f"not a statement: {st!r}")

    emit(m.stmts)
    code.extend((_OP_HALT, 0, 0))
    return tuple(code), max_reg + 1


@lru_cache(maxsize=512)
def _machine_cached(m: Machine):
    code, nregs = _compiled(m)
    return np.array(code, dtype=np.int64), nregs


def run_machine(m: Machine, x: int, budget: int) -> tuple[bool, int, int]:
    """Execute ``m`` on input ``x`` for at most ``budget`` steps.

    Returns (halted, output bit, steps executed).
    """
    code, nregs = _machine_cached(m)
    if nregs > _COMPILED_MAX_REGS:
        halted, value, steps = _pykernels.run_machine(code, nregs, x, budget)
    else:
        halted, value, steps = backend.run_machine(code, nregs, x, budget)
    return bool(halted), value, steps


def term_steps(term: ProgramTerm, x: int, probe_budget: int = DEFAULT_FUEL) -> Optional[int]:
    """Halting time of ``term`` on ``x`` under the documented cost model.

    Structural terms: eventually-constant costs min(x, |prefix|) + 1,
    thresholds cost 1, tables cost (#entries + 1). Machines report exact
    interpreter steps, or None if still running at ``probe_budget``.
    """
    if isinstance(term, EventuallyConstant):
        return min(x, len(term.prefix)) + 1
    if isinstance(term, Threshold):
        return 1
    if isinstance(term, FiniteTable):
        return len(term.entries) + 1
    halted, _, steps = run_machine(term, x, probe_budget)
    return steps if halted else None


def eval_term(term: ProgramTerm, x: int, fuel: Optional[int] = None) -> int:
    """Total-evaluation entry point; raises FuelExhausted for stuck machines."""
    if isinstance(term, EventuallyConstant):
        v = int(term.prefix[x]) if x < len(term.prefix) else term.tail
    elif isinstance(term, Threshold):
        v = 1 if (x if term.kind == "nat" else nat_to_int(x)) >= term.cut else 0
    elif isinstance(term, FiniteTable):
        v = term.lookup(x)
    elif isinstance(term, Machine):
        budget = DEFAULT_FUEL if fuel is None else fuel
        halted, v, steps = run_machine(term, x, budget)
        _meter(steps)
        if not halted:
            raise FuelExhausted(budget, f"machine at x={x}")
        return v
    else:
        raise TypeError(f"not a program term: {term!r}")
    if _METER_STACK:
        _meter(term_steps(term, x))
    return v


def eval_bounded(program, x: int, s: int):
    """phi_{e,s}(x): run program ``e`` for at most ``s`` steps.

    ``program`` may be a term or an index. Returns ('halted', bit) or
    ('running', None); monotone and value-stable in ``s``.
    """
    term = decode(program) if isinstance(program, int) else program
    if isinstance(term, Machine):
        halted, value, _ = run_machine(term, x, s)
        return ("halted", value) if halted else ("running", None)
    cost = term_steps(term, x)
    if cost is not None and cost <= s:
        return ("halted", eval_term(term, x))
    return ("running", None)


# ---------------------------------------------------------------------------
# fuel metering (per-game accounting; see engine.run_game)

_METER_STACK: list[list[int]] = []


def _meter(steps: Optional[int]) -> None:
    if _METER_STACK and steps:
        _METER_STACK[-1][0] += steps


@contextlib.contextmanager
def fuel_meter():
    """Context manager collecting evaluation steps; yields a 1-cell list."""
    cell = [0]
    _METER_STACK.append(cell)
    try:
        yield cell
    finally:
        _METER_STACK.pop()


# ---------------------------------------------------------------------------
# c.e. enumeration

def enumerate_ce(gen, steps: int) -> list[int]:
    """Dovetailed enumeration prefix: drive ``gen`` for ``steps`` steps.

    ``gen`` is a deterministic generator factory (or iterable); each
    ``next`` is one dovetailing step and may yield an index or None
    (internal work). Larger budgets extend the returned prefix, never
    reorder it.
    """
    it = iter(gen() if callable(gen) else gen)
    out = []
    for _ in range(steps):
        try:
            v = next(it)
        except StopIteration:
            break
        if v is not None:
            out.append(v)
    return out


def singleton_index_generator() -> Iterator[int]:
    """Indices of the one-nonzero-label functions, in domain order."""
    p = 0
    while True:
        yield encode(singleton_table(p))
        p += 1


def finite_support_index_generator() -> Iterator[int]:
    """Indices of all finite-support functions (support = bits of the counter)."""
    i = 0
    while True:
        entries = tuple((b, 1) for b in range(i.bit_length()) if (i >> b) & 1)
        yield encode(FiniteTable(entries, 0))
        i += 1


# ---------------------------------------------------------------------------
# surface syntax: one term per line


def format_term(term: ProgramTerm) -> str:
    if isinstance(term, EventuallyConstant):
        return f"ec {term.prefix or '-'} {term.tail}"
    if isinstance(term, Threshold):
        return f"thr {term.kind} {term.cut}"
    if isinstance(term, FiniteTable):
        body = ",".join(f"{k}:{v}" for k, v in term.entries) or "-"
        return f"tab {body} {term.default}"
    if isinstance(term, Machine):
        return "mach " + _format_stmts(term.stmts)
    raise TypeError(f"not a program term: {term!r}")


def _format_stmts(stmts) -> str:
    parts = []
    for st in stmts:
        if isinstance(st, Inc):
            parts.append(f"inc {st.reg}")
        elif isinstance(st, Dec):
            parts.append(f"dec {st.reg}")
        else:
            inner = _format_stmts(st.body)
            parts.append(f"while {st.reg} {{ {inner} }}" if inner else f"while {st.reg} {{ }}")
    return " ; ".join(parts)


def parse_term(text: str) -> ProgramTerm:
    parts = text.strip().split(None, 1)
    if not parts:
        raise ValueError("empty term")
    head, rest = parts[0], parts[1] if len(parts) > 1 else ""
    if head == "ec":
        prefix, tail = rest.split()
        prefix = "" if prefix == "-" else prefix
        return EventuallyConstant(prefix, int(tail))
    if head == "thr":
        kind, cut = rest.split()
        return Threshold(kind, int(cut))
    if head == "tab":
        body, default = rest.split()
        entries = []
        if body != "-":
            for item in body.split(","):
                k, v = item.split(":")
                entries.append((int(k), int(v)))
        return FiniteTable(tuple(entries), int(default))
    if head == "mach":
        return Machine(_parse_stmts(rest))
    raise ValueError(f"unknown term constructor {head!r}")


def load_program_file(path: str) -> list:
    """Program file: one term per line; '#' comments and blanks ignored."""
    out = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                out.append(parse_term(line))
    return out


def _parse_stmts(text: str) -> tuple:
    import re

    tokens = re.findall(r"[{};]|[A-Za-z]+|\d+", text)
    pos = 0

    def block():
        nonlocal pos
        stmts = []
        while pos < len(tokens) and tokens[pos] != "}":
            tok = tokens[pos]
            if tok == ";":
                pos += 1
                continue
            pos += 1
            if tok in ("inc", "dec"):
                reg = int(tokens[pos])
                pos += 1
                stmts.append(Inc(reg) if tok == "inc" else Dec(reg))
            elif tok == "while":
                reg = int(tokens[pos])
                pos += 1
                if tokens[pos] != "{":
                    raise ValueError("expected '{' after while")
                pos += 1
                body = block()
                if pos >= len(tokens) or tokens[pos] != "}":
                    raise ValueError("unbalanced '}'")
                pos += 1
                stmts.append(While(reg, body))
            else:
                raise ValueError(f"unexpected token {tok!r}")
        return tuple(stmts)

    stmts = block()
    if pos != len(tokens):
        raise ValueError("unbalanced '}'")
    return stmts


# ---------------------------------------------------------------------------
# learner registry: the desk-scale universe of candidate learners


@dataclass
class RegistryEntry:
    """A candidate learner with a declared deterministic halting-time.

    ``steps(sample, x)`` returns the number of computation steps after
    which the prediction is available, or None if the entry never halts
    on that input. The step-bounded probe phi_{e,s} is then: halted at
    budget s iff steps <= s (monotone and value-stable by construction).
    """

    name: str
    predict: Callable
    steps: Callable
    total: bool


@dataclass
class LearnerRegistry:
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> RegistryEntry:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def total_indices(self) -> list[int]:
        return [i for i, e in enumerate(self.entries) if e.total]


def probe(entry: RegistryEntry, sample, x: int, budget: int) -> Optional[int]:
    """phi_{e,s}-style probe of a registry entry; None while running."""
    cost = entry.steps(sample, x)
    if cost is None or cost > budget:
        return None
    return entry.predict(sample, x)
