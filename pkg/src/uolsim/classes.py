"""Concrete hypothesis classes and class constructions.

Each construction returns a :class:`~uolsim.core.HypothesisClass` carrying
the strongest oracle available: the four named builtins, tree classes,
the diagonal ("evil") class against a learner registry, the timestep
enumeration that defeats every proper candidate learner, and coloring
classes of finite graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from . import progmodel
from .core import (
    ExtendabilityAnswer,
    Hypothesis,
    HypothesisClass,
    RealizabilityMonitor,
    Sample,
    evaluate,
)
from .progmodel import (
    DEFAULT_FUEL,
    EventuallyConstant,
    FiniteTable,
    LearnerRegistry,
    Threshold,
    encode,
    nat_to_int,
    singleton_table,
)


class UndefinedAt(Exception):
    """A diagonal-sequence bit could not be computed within fuel."""

    def __init__(self, position: int):
        self.position = position
        super().__init__(f"sequence undefined at position {position}")


class ImproperColoring(Exception):
    """A partial coloring assigns equal colors to adjacent vertices."""


class NotExtendable(Exception):
    """A proper partial coloring admits no total extension."""


class GraphNotColorable(Exception):
    """The graph has no coloring with the requested number of colors."""


def _zeros_hypothesis() -> Hypothesis:
    return Hypothesis(EventuallyConstant("", 0), name="zeros")


def _ones_hypothesis() -> Hypothesis:
    return Hypothesis(EventuallyConstant("", 1), name="ones")


def singleton_hypothesis(p: int) -> Hypothesis:
    return Hypothesis(singleton_table(p), name=f"singleton@{p}")


def threshold_hypothesis(cut: int, kind: str = "nat") -> Hypothesis:
    return Hypothesis(Threshold(kind, cut), name=f"threshold_{kind}@{cut}")


# ---------------------------------------------------------------------------
# builtin classes


def _split_labels(sample) -> Optional[tuple[set, set]]:
    """(ones, zeros) point sets, or None when some point carries both labels."""
    ones, zeros = set(), set()
    for x, y in sample:
        (ones if y == 1 else zeros).add(x)
    if ones & zeros:
        return None
    return ones, zeros


def _singletons_answer(ones: set, zeros: set) -> ExtendabilityAnswer:
    if len(ones) > 1:
        return ExtendabilityAnswer.no()
    if ones:
        p = next(iter(ones))
        return ExtendabilityAnswer.yes(singleton_hypothesis(p))
    fresh = max(zeros, default=-1) + 1
    return ExtendabilityAnswer.yes(singleton_hypothesis(fresh))


class _LabelSetMonitor(RealizabilityMonitor):
    """Incremental monitor over (ones, zeros) sets with a pure verdict fn."""

    def __init__(self, answer: Callable[[set, set], ExtendabilityAnswer]):
        self._answer = answer
        self.ones: set = set()
        self.zeros: set = set()

    def query(self, x, y):
        ones = self.ones | {x} if y == 1 else self.ones
        zeros = self.zeros | {x} if y != 1 else self.zeros
        if ones & zeros:
            return ExtendabilityAnswer.no()
        return self._answer(ones, zeros)

    def push(self, x, y):
        (self.ones if y == 1 else self.zeros).add(x)


def _sample_oracle(answer):
    def oracle(sample):
        split = _split_labels(sample)
        if split is None:
            return ExtendabilityAnswer.no()
        return answer(*split)

    return oracle


def singletons() -> HypothesisClass:
    """All functions with exactly one nonzero label."""

    def members():
        p = 0
        while True:
            yield singleton_hypothesis(p)
            p += 1

    def closure():
        yield _zeros_hypothesis()
        yield from members()

    def word_ext(w):
        ones = [i for i, c in enumerate(w) if c == "1"]
        if len(ones) > 1:
            return ExtendabilityAnswer.no()
        if len(ones) == 1:
            return ExtendabilityAnswer.yes(singleton_hypothesis(ones[0]))
        return ExtendabilityAnswer.yes(_zeros_hypothesis())

    return HypothesisClass(
        name="singletons",
        kind="builtin",
        members=members,
        word_extendable=word_ext,
        sample_realizable=_sample_oracle(_singletons_answer),
        closure_members=closure,
        monitor_factory=lambda: _LabelSetMonitor(_singletons_answer),
    )


def finite_support() -> HypothesisClass:
    """All functions with finitely many nonzero labels.

    The closure is every binary sequence, so the word oracle always says
    yes and there is no closure enumeration.
    """

    def members():
        i = 0
        while True:
            entries = tuple((b, 1) for b in range(i.bit_length()) if (i >> b) & 1)
            yield Hypothesis(FiniteTable(entries, 0), name=f"support#{i}")
            i += 1

    def answer(ones, zeros):
        return ExtendabilityAnswer.yes(
            Hypothesis(FiniteTable(tuple((p, 1) for p in sorted(ones)), 0))
        )

    def word_ext(w):
        entries = tuple((i, 1) for i, c in enumerate(w) if c == "1")
        return ExtendabilityAnswer.yes(Hypothesis(FiniteTable(entries, 0)))

    return HypothesisClass(
        name="finite_support",
        kind="builtin",
        members=members,
        word_extendable=word_ext,
        sample_realizable=_sample_oracle(answer),
        closure_members=None,
        monitor_factory=lambda: _LabelSetMonitor(answer),
    )


def _thresholds_nat_answer(ones, zeros):
    max_zero = max(zeros, default=-1)
    min_one = min(ones) if ones else None
    if min_one is not None and min_one <= max_zero:
        return ExtendabilityAnswer.no()
    return ExtendabilityAnswer.yes(threshold_hypothesis(max_zero + 1))


def thresholds_nat() -> HypothesisClass:
    """Step functions h(x) = 1 iff x >= cut; the closure adds all-zeros."""

    def members():
        cut = 0
        while True:
            yield threshold_hypothesis(cut)
            cut += 1

    def closure():
        yield _zeros_hypothesis()
        yield from members()

    def word_ext(w):
        first_one = w.find("1")
        if first_one >= 0 and "0" in w[first_one:]:
            return ExtendabilityAnswer.no()
        cut = first_one if first_one >= 0 else len(w)
        return ExtendabilityAnswer.yes(threshold_hypothesis(cut))

    return HypothesisClass(
        name="thresholds_nat",
        kind="builtin",
        members=members,
        word_extendable=word_ext,
        sample_realizable=_sample_oracle(_thresholds_nat_answer),
        closure_members=closure,
        monitor_factory=lambda: _LabelSetMonitor(_thresholds_nat_answer),
    )


def _thresholds_int_answer(ones, zeros):
    zmax_zero = max((nat_to_int(x) for x in zeros), default=None)
    zmin_one = min((nat_to_int(x) for x in ones), default=None)
    if zmax_zero is not None and zmin_one is not None and zmin_one <= zmax_zero:
        return ExtendabilityAnswer.no()
    if zmax_zero is not None:
        cut = zmax_zero + 1
    elif zmin_one is not None:
        cut = zmin_one
    else:
        cut = 0
    return ExtendabilityAnswer.yes(threshold_hypothesis(cut, "int"))


def thresholds_int() -> HypothesisClass:
    """Thresholds on Z, embedded into N by the zig-zag bijection.

    The closure adds both constant limits (cut to +inf and -inf).
    """

    def members():
        i = 0
        while True:
            yield threshold_hypothesis(nat_to_int(i), "int")
            i += 1

    def closure():
        yield _zeros_hypothesis()
        yield _ones_hypothesis()
        yield from members()

    def word_ext(w):
        ones = {i for i, c in enumerate(w) if c == "1"}
        zeros = set(range(len(w))) - ones
        return _thresholds_int_answer(ones, zeros)

    return HypothesisClass(
        name="thresholds_int",
        kind="builtin",
        members=members,
        word_extendable=word_ext,
        sample_realizable=_sample_oracle(_thresholds_int_answer),
        closure_members=closure,
        monitor_factory=lambda: _LabelSetMonitor(_thresholds_int_answer),
    )


_BUILTINS = {
    "singletons": singletons,
    "finite_support": finite_support,
    "thresholds_nat": thresholds_nat,
    "thresholds_int": thresholds_int,
}


def builtin_class(name: str) -> HypothesisClass:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin class {name!r}") from None


def explicit_finite(hyps: Sequence[Hypothesis], name: str = "explicit") -> HypothesisClass:
    """A finite class given by an explicit member list (its own closure)."""
    hyps = list(hyps)

    def members():
        return iter(hyps)

    def sample_real(sample):
        points = list(sample)
        for h in hyps:
            if all(evaluate(h, x) == y for x, y in points):
                return ExtendabilityAnswer.yes(h)
        return ExtendabilityAnswer.no()

    def word_ext(w):
        return sample_real(Sample.from_word(w))

    return HypothesisClass(
        name=name,
        kind="explicit-finite",
        members=members,
        word_extendable=word_ext,
        sample_realizable=sample_real,
        closure_members=members,
        size=len(hyps),
    )


# ---------------------------------------------------------------------------
# tree classes


@dataclass
class ComputableTree:
    """A prefix-closed set of binary words given by a membership test."""

    member: Callable[[str], bool]
    name: str = "tree"

    def words(self) -> Iterator[str]:
        """Members in length-then-lexicographic order; lazy, maybe infinite."""
        if not self.member(""):
            return
        level = [""]
        while level:
            yield from level
            level = [w + b for w in level for b in "01" if self.member(w + b)]


def tree_from_words(words: Iterable[str], name: str = "tree") -> ComputableTree:
    wordset = set(words)
    for w in wordset:
        if w and w[:-1] not in wordset:
            raise ValueError(f"word list is not prefix-closed at {w!r}")
    return ComputableTree(lambda s: s in wordset, name)


def named_tree(spec: str) -> ComputableTree:
    """Named predicates: 'zeros' and 'full0:<depth>'."""
    if spec == "zeros":
        return ComputableTree(lambda w: "1" not in w, "zeros")
    if spec.startswith("full0:"):
        d = int(spec.split(":", 1)[1])
        return ComputableTree(lambda w: "1" not in w[d:], spec)
    raise ValueError(f"unknown tree predicate {spec!r}")


def load_tree(path: str) -> ComputableTree:
    """Tree file: 'predicate: <name>' or one word per line ('-' = empty)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if lines and lines[0].startswith("predicate:"):
        return named_tree(lines[0].split(":", 1)[1].strip())
    return tree_from_words(("" if ln == "-" else ln) for ln in lines)


def _tree_witness(tree: ComputableTree, constraints: dict) -> Optional[str]:
    """A word sigma in T with sigma,0-tail consistent with the constraints.

    Only positions below the last 1-labeled point need search; zeros beyond
    any candidate word are matched by the 0 tail.
    """
    ones = [x for x, y in constraints.items() if y == 1]
    depth = max(ones, default=-1) + 1
    if not tree.member(""):
        return None

    def extend(word):
        if len(word) == depth:
            return word
        want = constraints.get(len(word))
        for b in "01" if want is None else str(want):
            cand = word + b
            if tree.member(cand):
                hit = extend(cand)
                if hit is not None:
                    return hit
        return None

    if depth == 0:
        # zero-labeled constraints only; the 0 tail of "" satisfies them
        return ""
    return extend("")


class _TreeMonitor(RealizabilityMonitor):
    def __init__(self, tree: ComputableTree):
        self.tree = tree
        self.constraints: dict = {}
        self.dead = False

    def _verdict(self, constraints):
        sigma = _tree_witness(self.tree, constraints)
        if sigma is None:
            return ExtendabilityAnswer.no()
        return ExtendabilityAnswer.yes(Hypothesis(EventuallyConstant(sigma, 0)))

    def query(self, x, y):
        if self.dead or self.constraints.get(x, y) != y:
            return ExtendabilityAnswer.no()
        return self._verdict({**self.constraints, x: y})

    def push(self, x, y):
        if self.constraints.get(x, y) != y:
            self.dead = True
        self.constraints[x] = y


def tree_class(tree: ComputableTree) -> HypothesisClass:
    """{sigma . 0-tail : sigma in T}, with an exact extendability oracle.

    The closure enumeration coincides with the member enumeration for the
    trees shipped here (word lists and the named predicates), whose
    infinite paths are all eventually zero.
    """

    def members():
        for sigma in tree.words():
            yield Hypothesis(EventuallyConstant(sigma, 0), name=f"{tree.name}[{sigma or '-'}]")

    def word_ext(w):
        m = w.rfind("1")
        if m < 0:
            if tree.member(""):
                return ExtendabilityAnswer.yes(_zeros_hypothesis())
            return ExtendabilityAnswer.no()
        sigma = w[: m + 1]
        if tree.member(sigma):
            return ExtendabilityAnswer.yes(Hypothesis(EventuallyConstant(sigma, 0)))
        return ExtendabilityAnswer.no()

    def sample_real(sample):
        split = _split_labels(sample)
        if split is None:
            return ExtendabilityAnswer.no()
        ones, zeros = split
        constraints = {x: 0 for x in zeros}
        constraints.update({x: 1 for x in ones})
        sigma = _tree_witness(tree, constraints)
        if sigma is None:
            return ExtendabilityAnswer.no()
        return ExtendabilityAnswer.yes(Hypothesis(EventuallyConstant(sigma, 0)))

    return HypothesisClass(
        name=f"tree({tree.name})",
        kind="builtin",
        members=members,
        word_extendable=word_ext,
        sample_realizable=sample_real,
        closure_members=members,
        monitor_factory=lambda: _TreeMonitor(tree),
    )


# ---------------------------------------------------------------------------
# the diagonal class against a learner registry


class EvilSequence:
    """The diagonal sequence for registry entry n, extended lazily.

    Bits 0..n are 0^n 1; every later bit is the opposite of what entry n
    predicts after seeing all earlier bits. Bits are memoized: bit k costs
    one learner simulation on the length-k prefix, so sequential access is
    linear instead of quadratic.
    """

    def __init__(self, registry: LearnerRegistry, n: int, fuel: int = DEFAULT_FUEL):
        if n >= len(registry):
            raise IndexError(f"registry has no entry {n}")
        self.registry = registry
        self.n = n
        self.fuel = fuel
        self._entry = registry[n]
        self._pts: list = []
        self._bits: list = []

    def _extend_to(self, k: int) -> None:
        while len(self._bits) <= k:
            m = len(self._bits)
            if m < self.n:
                b = 0
            elif m == self.n:
                b = 1
            else:
                sample = Sample._view(self._pts, m)
                cost = self._entry.steps(sample, m)
                if cost is None or cost > self.fuel:
                    raise UndefinedAt(m)
                b = 1 - self._entry.predict(sample, m)
            self._bits.append(b)
            self._pts.append((m, b))

    def bit(self, k: int) -> int:
        self._extend_to(k)
        return self._bits[k]

    def prefix(self, horizon: int) -> str:
        self._extend_to(horizon - 1)
        return "".join(map(str, self._bits[:horizon]))


def evil_sequence(n: int, registry: LearnerRegistry, horizon: int,
                  fuel: int = DEFAULT_FUEL) -> str:
    """Length-horizon prefix of the diagonal sequence for entry n.

    Raises UndefinedAt(k) if the entry fails to halt within fuel at k.
    """
    return EvilSequence(registry, n, fuel).prefix(horizon)


def evil_class(registry: LearnerRegistry, horizon: Optional[int] = None,
               fuel: int = DEFAULT_FUEL) -> HypothesisClass:
    """The least class containing the diagonal sequences of the registry's
    total entries; the closure oracle adds the all-zeros limit.

    ``horizon`` optionally pre-materializes that many bits of each member.
    """
    seqs = {n: EvilSequence(registry, n, fuel) for n in registry.total_indices()}
    hyps = {n: Hypothesis(seq.bit, name=f"evil[{n}]") for n, seq in seqs.items()}
    if horizon:
        for seq in seqs.values():
            seq.prefix(horizon)

    def members():
        return iter([hyps[n] for n in sorted(hyps)])

    def candidates():
        yield _zeros_hypothesis()
        yield from members()

    def word_ext(w):
        if "1" not in w:
            return ExtendabilityAnswer.yes(_zeros_hypothesis())
        n = w.find("1")
        if n not in seqs:
            return ExtendabilityAnswer.no()
        if seqs[n].prefix(len(w)) == w:
            return ExtendabilityAnswer.yes(hyps[n])
        return ExtendabilityAnswer.no()

    def sample_real(sample):
        points = list(sample)
        for h in candidates():
            if all(evaluate(h, x) == y for x, y in points):
                return ExtendabilityAnswer.yes(h)
        return ExtendabilityAnswer.no()

    class _Monitor(RealizabilityMonitor):
        def __init__(self):
            self.alive = list(candidates())

        def query(self, x, y):
            for h in self.alive:
                if evaluate(h, x) == y:
                    return ExtendabilityAnswer.yes(h)
            return ExtendabilityAnswer.no()

        def push(self, x, y):
            self.alive = [h for h in self.alive if evaluate(h, x) == y]

    return HypothesisClass(
        name="evil",
        kind="builtin",
        members=members,
        word_extendable=word_ext,
        sample_realizable=sample_real,
        closure_members=candidates,
        monitor_factory=_Monitor,
        size=len(hyps),
    )


# ---------------------------------------------------------------------------
# the timestep construction defeating every proper candidate learner


@dataclass(frozen=True)
class TraceEvent:
    s: int
    e: int
    kind: str  # 'enumerate' | 'extend' | 'deactivate'
    j: int  # 1-run length of the gamma word involved


@dataclass(frozen=True)
class ProbeRecord:
    s: int
    e: int
    gamma_len: int
    value: int


def member_word(e: int, j: int) -> str:
    return "0" * e + "1" * j


def member_term(e: int, j: int) -> EventuallyConstant:
    return EventuallyConstant(member_word(e, j), 0)


@dataclass
class ConstructionState:
    enumerated: set  # of (e, j)
    gammas: dict  # e -> j
    active: dict  # e -> bool


class ConstructionTrace:
    """Event log of a priority-construction run.

    Per-timestep states are reconstructed on demand instead of stored:
    the enumerated set only grows, gamma words only gain 1s, and
    deactivation is permanent, so the log determines every state.
    """

    def __init__(self, registry_names, s_max, events, probes, gammas, active):
        self.registry_names = list(registry_names)
        self.s_max = s_max
        self.events = events
        self.probes = probes
        self.final_gammas = gammas
        self.final_active = active

    def members(self) -> list:
        """Enumerated members as (e, j, timestep), in enumeration order."""
        return [(ev.e, ev.j, ev.s) for ev in self.events if ev.kind in ("enumerate", "extend")]

    def member_indices(self) -> list:
        return [encode(member_term(e, j)) for e, j, _ in self.members()]

    def state_at(self, s: int) -> ConstructionState:
        enumerated = set()
        gammas = {e: 1 for e in range(len(self.registry_names))}
        active = {e: True for e in range(len(self.registry_names))}
        for ev in self.events:
            if ev.s > s:
                break
            if ev.kind == "deactivate":
                active[ev.e] = False
            else:
                enumerated.add((ev.e, ev.j))
                if ev.kind == "extend":
                    gammas[ev.e] = ev.j
        return ConstructionState(enumerated, gammas, active)

    def probes_for(self, e: int) -> list:
        return [p for p in self.probes if p.e == e]

    def to_lines(self) -> list:
        lines = [f"timesteps\t{self.s_max}", f"entries\t{len(self.registry_names)}"]
        for i, name in enumerate(self.registry_names):
            lines.append(f"entry\t{i}\t{name}")
        for ev in self.events:
            lines.append(f"event\t{ev.s}\t{ev.e}\t{ev.kind}\t{member_word(ev.e, ev.j)}")
        for e in range(len(self.registry_names)):
            gamma = member_word(e, self.final_gammas[e])
            state = "active" if self.final_active[e] else "inactive"
            probes = len(self.probes_for(e))
            lines.append(f"final\t{e}\t{state}\tprobes={probes}\tgamma_len={len(gamma)}")
        return lines


def priority_construct(registry: LearnerRegistry, s_max: int,
                       fuel_schedule: Optional[Callable[[int], int]] = None) -> ConstructionTrace:
    """Run the requirement strategies for s = 0..s_max.

    Strategy for entry e: at timestep s = e, enumerate the one-point
    extension of gamma_e = 0^e 1; afterwards, while active, probe the
    entry's step-bounded prediction on the gamma_e sample at its own
    length. A prediction of 1 deactivates the strategy forever; a
    prediction of 0 enumerates gamma_e 1 with a 0 tail and appends a 1
    to gamma_e. The probe at timestep s uses budget fuel_schedule(s)
    (identity by default).
    """
    if s_max < len(registry):
        raise ValueError("s_max must be at least the registry size")
    schedule = fuel_schedule if fuel_schedule is not None else (lambda s: s)

    m = len(registry)
    events: list = []
    probes: list = []
    js = {e: 1 for e in range(m)}
    active = {e: True for e in range(m)}
    pts = {e: [(i, 0) for i in range(e)] + [(e, 1)] for e in range(m)}
    cost_memo: dict = {}
    value_memo: dict = {}

    for s in range(s_max + 1):
        for e in range(min(s, m - 1) + 1):
            if s == e:
                events.append(TraceEvent(s, e, "enumerate", js[e]))
                continue
            if not active[e]:
                continue
            length = e + js[e]
            sample = Sample._view(pts[e], length)
            if e not in cost_memo:
                cost_memo[e] = registry[e].steps(sample, length)
            cost = cost_memo[e]
            if cost is None or cost > schedule(s):
                continue
            if e not in value_memo:
                value_memo[e] = registry[e].predict(sample, length)
            b = value_memo[e]
            probes.append(ProbeRecord(s, e, length, b))
            if b == 1:
                active[e] = False
                events.append(TraceEvent(s, e, "deactivate", js[e]))
            else:
                js[e] += 1
                pts[e].append((length, 1))
                events.append(TraceEvent(s, e, "extend", js[e]))
                cost_memo.pop(e, None)
                value_memo.pop(e, None)

    return ConstructionTrace([r.name for r in registry], s_max, events, probes, js, active)


# ---------------------------------------------------------------------------
# coloring classes


@dataclass
class ComputableGraph:
    """A finite undirected graph with a color budget."""

    n: int
    k: int
    edges: frozenset = field(default_factory=frozenset)
    name: str = "graph"

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError("graphs are irreflexive")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError("edge endpoint out of range")
            norm.add((min(u, v), max(u, v)))
        self.edges = frozenset(norm)
        self._adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            self._adj[u].add(v)
            self._adj[v].add(u)

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def neighbors(self, v: int) -> set:
        return self._adj[v]


def parse_graph(text: str, name: str = "graph") -> ComputableGraph:
    """First line 'n k'; one 'u v' edge per line after it."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty graph file")
    n, k = (int(v) for v in lines[0].split())
    edges = frozenset(tuple(int(v) for v in ln.split()) for ln in lines[1:])
    return ComputableGraph(n, k, edges, name)


def load_graph(path: str) -> ComputableGraph:
    with open(path, "r", encoding="ascii") as fh:
        return parse_graph(fh.read(), name=path)


def _check_partial(G: ComputableGraph, f: Sequence[int]) -> None:
    if len(f) > G.n:
        raise ImproperColoring("coloring longer than the vertex enumeration")
    for v, c in enumerate(f):
        if not 1 <= c <= G.k:
            raise ImproperColoring(f"color {c} out of range at vertex {v}")
        for u in G.neighbors(v):
            if u < v and f[u] == c:
                raise ImproperColoring(f"adjacent vertices {u},{v} share color {c}")


def _complete(G: ComputableGraph, assignment: dict, order: list) -> Optional[dict]:
    """Lexicographic-least completion over ``order``; None if impossible."""
    if not order:
        return dict(assignment)
    v = order[0]
    for c in range(1, G.k + 1):
        if any(assignment.get(u) == c for u in G.neighbors(v)):
            continue
        assignment[v] = c
        hit = _complete(G, assignment, order[1:])
        if hit is not None:
            return hit
        del assignment[v]
    return None


def coloring_extendable(G: ComputableGraph, f: Sequence[int]) -> bool:
    """Does a total coloring of G extend the initial-segment coloring f?"""
    _check_partial(G, f)
    assignment = {v: c for v, c in enumerate(f)}
    return _complete(G, assignment, list(range(len(f), G.n))) is not None


def extension_operator(G: ComputableGraph, f: Sequence[int]) -> tuple:
    """The lexicographically-least total coloring extending f.

    Vertex order v_0, v_1, ...; colors tried in increasing order, so the
    first completion found is the least one. Deterministic; idempotent on
    prefixes of its own outputs.
    """
    _check_partial(G, f)
    assignment = {v: c for v, c in enumerate(f)}
    hit = _complete(G, assignment, list(range(len(f), G.n)))
    if hit is None:
        raise NotExtendable(f"no total coloring extends {tuple(f)}")
    return tuple(hit[v] for v in range(G.n))


def all_colorings(G: ComputableGraph) -> list:
    """Every total coloring, in lexicographic order."""
    out = []

    def walk(prefix):
        if len(prefix) == G.n:
            out.append(tuple(prefix))
            return
        v = len(prefix)
        for c in range(1, G.k + 1):
            if any(u < v and prefix[u] == c for u in G.neighbors(v)):
                continue
            prefix.append(c)
            walk(prefix)
            prefix.pop()

    walk([])
    return out


def coloring_hypothesis(G: ComputableGraph, colors: Sequence[int]) -> Hypothesis:
    # default color 1 beyond the vertex enumeration; the game queries vertices
    table = FiniteTable(tuple((v, c) for v, c in enumerate(colors)), default=1)
    return Hypothesis(table, name="col[" + "".join(map(str, colors)) + "]")


def coloring_class(G: ComputableGraph) -> HypothesisClass:
    """All canonical extensions c(f, .) of extendable partial colorings.

    For a finite graph this is exactly the set of total colorings; the
    word oracle is extendability of the induced partial coloring.
    """
    if G.k > 9:
        raise ValueError("color words use single digits; k must be <= 9")
    totals = all_colorings(G)
    if not totals:
        raise GraphNotColorable(f"{G.name} has no {G.k}-coloring")
    hyps = [coloring_hypothesis(G, cols) for cols in totals]

    def members():
        return iter(hyps)

    def word_ext(w):
        f = [int(c) for c in w[: G.n]]
        beyond = w[G.n:]
        if any(c != "1" for c in beyond):
            return ExtendabilityAnswer.no()
        try:
            ext = extension_operator(G, f)
        except (ImproperColoring, NotExtendable):
            return ExtendabilityAnswer.no()
        return ExtendabilityAnswer.yes(coloring_hypothesis(G, ext))

    def _answer(constraints: dict) -> ExtendabilityAnswer:
        order = [v for v in range(G.n) if v not in constraints]
        hit = _complete(G, dict(constraints), order)
        if hit is None:
            return ExtendabilityAnswer.no()
        return ExtendabilityAnswer.yes(coloring_hypothesis(G, [hit[v] for v in range(G.n)]))

    def sample_real(sample):
        constraints: dict = {}
        for x, y in sample:
            if x >= G.n:
                if y != 1:
                    return ExtendabilityAnswer.no()
                continue
            if not 1 <= y <= G.k or constraints.get(x, y) != y:
                return ExtendabilityAnswer.no()
            if any(constraints.get(u) == y for u in G.neighbors(x)):
                return ExtendabilityAnswer.no()
            constraints[x] = y
        return _answer(constraints)

    class _Monitor(RealizabilityMonitor):
        def __init__(self):
            self.constraints: dict = {}
            self.dead = False

        def query(self, x, y):
            if self.dead:
                return ExtendabilityAnswer.no()
            if x >= G.n:
                if y != 1:
                    return ExtendabilityAnswer.no()
                return _answer(self.constraints)
            if not 1 <= y <= G.k or self.constraints.get(x, y) != y:
                return ExtendabilityAnswer.no()
            if any(self.constraints.get(u) == y for u in G.neighbors(x)):
                return ExtendabilityAnswer.no()
            return _answer({**self.constraints, x: y})

        def push(self, x, y):
            if x >= G.n:
                if y != 1:
                    self.dead = True
                return
            if not 1 <= y <= G.k or self.constraints.get(x, y) != y:
                self.dead = True
                return
            if any(self.constraints.get(u) == y for u in G.neighbors(x)):
                self.dead = True
            self.constraints[x] = y

    return HypothesisClass(
        name=f"coloring({G.name},k={G.k})",
        kind="builtin",
        members=members,
        label_arity=G.k,
        word_extendable=word_ext,
        sample_realizable=sample_real,
        closure_members=members,
        monitor_factory=_Monitor,
        size=len(hyps),
    )
