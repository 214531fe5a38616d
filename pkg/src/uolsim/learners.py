"""Learner constructions behind one uniform prediction interface.

A learner maps (sample, query point, optional advice) to a label.
Randomized learners read advice bits through the :class:`AdviceBits`
interface only, which is what makes the derandomizer and the Monte Carlo
engine work uniformly: advice is a deterministic function of a 64-bit
seed, split into disjoint columns by the Cantor pairing.

Learners are immutable once constructed and ``predict`` is a pure
function of its inputs; the incremental per-stream caches are keyed on
the sample's grow-only backing list and fall back to recomputation from
scratch whenever the key does not match.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import backend
from .classes import EvilSequence, UndefinedAt
from .core import (
    Hypothesis,
    HypothesisClass,
    Sample,
    SearchExhausted,
    evaluate,
)
from .progmodel import DEFAULT_FUEL, LearnerRegistry, RegistryEntry, pair


class MassUnreachable(Exception):
    """The derandomizer hit its depth cap before reaching the halting mass."""


class Learner:
    """Base prediction strategy. Subclasses implement ``predict``."""

    randomized = False
    total_on = "all-samples"  # or 'realizable-only'
    name = "learner"
    fuel: Optional[int] = None

    def predict(self, sample: Sample, x: int, advice=None) -> int:
        raise NotImplementedError

    def __repr__(self):
        return f"<learner {self.name}>"


class FnLearner(Learner):
    def __init__(self, fn: Callable, name: str, randomized: bool = False):
        self._fn = fn
        self.name = name
        self.randomized = randomized

    def predict(self, sample, x, advice=None):
        if self.randomized:
            return self._fn(sample, x, advice)
        return self._fn(sample, x)


def constant_learner(bit: int) -> Learner:
    return FnLearner(lambda s, x: bit, f"constant{bit}")


def parity_learner() -> Learner:
    return FnLearner(lambda s, x: len(s) % 2, "parity")


def last_label_learner() -> Learner:
    return FnLearner(lambda s, x: s[-1][1] if len(s) else 0, "last_label")


def coin_flip_learner() -> Learner:
    def flip(s, x, advice):
        if advice is None:
            raise ValueError("coin_flip needs advice")
        return advice.column(len(s)).bit(0)

    return FnLearner(flip, "coin_flip", randomized=True)


class RegistryLearner(Learner):
    """Adapter: play a registry entry as a game learner."""

    def __init__(self, entry: RegistryEntry):
        self.entry = entry
        self.name = f"registry:{entry.name}"

    def predict(self, sample, x, advice=None):
        return self.entry.predict(sample, x)


# ---------------------------------------------------------------------------
# advice streams


_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class AdviceBits:
    """Random-access infinite bit tape with disjoint column views."""

    def bit(self, i: int) -> int:
        raise NotImplementedError

    def column(self, k: int) -> "ColumnView":
        return ColumnView(self, k)


class AdviceStream(AdviceBits):
    """Seeded advice: bit i is the low bit of splitmix64(seed + (i+1)*golden).

    Columns are bit positions pair(k, 0), pair(k, 1), ...; distinct columns
    are disjoint position sets, so column views compose and stay mutually
    independent streams.
    """

    def __init__(self, seed: int):
        self.seed = seed & _MASK64

    def bit(self, i: int) -> int:
        return _splitmix64((self.seed + (i + 1) * _GOLDEN) & _MASK64) & 1


class ColumnView(AdviceBits):
    def __init__(self, base: AdviceBits, k: int):
        self.base = base
        self.k = k

    def bit(self, j: int) -> int:
        return self.base.bit(pair(self.k, j))


class _NeedBit(Exception):
    def __init__(self, pos: int):
        self.pos = pos


class AssignedAdvice(AdviceBits):
    """Finite partial advice assignment; unassigned reads raise _NeedBit."""

    def __init__(self, assignment: dict):
        self.assignment = assignment

    def bit(self, i: int) -> int:
        try:
            return self.assignment[i]
        except KeyError:
            raise _NeedBit(i) from None


# ---------------------------------------------------------------------------
# flattened enumerations and the least-consistent-index machinery


class _GrowBuf:
    __slots__ = ("arr", "n")

    def __init__(self, dtype=np.int64, cap=64):
        self.arr = np.zeros(cap, dtype=dtype)
        self.n = 0

    def _room(self, extra):
        need = self.n + extra
        if need > len(self.arr):
            cap = max(need, 2 * len(self.arr))
            arr = np.zeros(cap, dtype=self.arr.dtype)
            arr[: self.n] = self.arr[: self.n]
            self.arr = arr

    def push(self, v):
        self._room(1)
        self.arr[self.n] = v
        self.n += 1

    def extend(self, vals):
        self._room(len(vals))
        for v in vals:
            self.arr[self.n] = v
            self.n += 1

    def view(self):
        return self.arr[: self.n]


class FlatEnum:
    """A materialized-on-demand enumeration with kernel-ready flat arrays."""

    def __init__(self, factory: Callable[[], Iterable[Hypothesis]]):
        self._iter = iter(factory())
        self.hyps: list = []
        self.exhausted = False
        self._kinds = _GrowBuf()
        self._p0 = _GrowBuf()
        self._off = _GrowBuf()
        self._len = _GrowBuf()
        self._aux = _GrowBuf()
        self._flat_ok: list = []

    def ensure(self, n: int) -> int:
        """Materialize up to n hypotheses; returns the count available."""
        while len(self.hyps) < n and not self.exhausted:
            try:
                h = next(self._iter)
            except StopIteration:
                self.exhausted = True
                break
            self.hyps.append(h)
            flat = h.flat()
            if flat is None:
                self._flat_ok.append(False)
                self._kinds.push(-1)
                self._p0.push(0)
                self._off.push(self._aux.n)
                self._len.push(0)
            else:
                kind, p0, aux = flat
                self._flat_ok.append(True)
                self._kinds.push(kind)
                self._p0.push(p0)
                self._off.push(self._aux.n)
                self._len.push(len(aux))
                self._aux.extend(aux)
        return len(self.hyps)

    def hypothesis(self, i: int) -> Hypothesis:
        if self.ensure(i + 1) <= i:
            raise IndexError(f"enumeration exhausted before index {i}")
        return self.hyps[i]

    def scan(self, xs, ys, npts: int, start: int, stop: int) -> int:
        """Least index in [start, stop) consistent with the stream arrays."""
        stop = min(stop, self.ensure(stop))
        i = start
        xs_v = xs[:npts]
        ys_v = ys[:npts]
        while i < stop:
            if self._flat_ok[i]:
                j = i + 1
                while j < stop and self._flat_ok[j]:
                    j += 1
                r = backend.scan_consistent(
                    self._kinds.view(), self._p0.view(), self._off.view(),
                    self._len.view(), self._aux.view(), xs_v, ys_v, i, j,
                )
                if r >= 0:
                    return int(r)
                i = j
            else:
                h = self.hyps[i]
                if all(evaluate(h, int(xs[t])) == int(ys[t]) for t in range(npts)):
                    return i
                i += 1
        return -1


class _StreamState:
    __slots__ = ("backing", "n", "xs", "ys", "floor", "checked")

    def __init__(self, backing):
        self.backing = backing
        self.n = 0
        self.xs = _GrowBuf()
        self.ys = _GrowBuf()
        self.floor = 0
        self.checked = 0


class EnumerationLearner(Learner):
    """Follow the least enumeration index consistent with the sample.

    Capped (the default): i0 = least consistent index below |S|, falling
    back to index |S| itself when none is; total whenever the enumeration
    is. Uncapped: the least consistent index outright, which diverges on
    non-realizable streams and is therefore guarded by ``search_cap``
    (SearchExhausted).

    Along a growing stream the selected index never revisits an abandoned
    candidate, so the incremental state is a floor index plus how many
    points the floor candidate has been checked against.
    """

    def __init__(self, source, capped: bool = True, search_cap: int = 20000,
                 name: Optional[str] = None):
        factory = source.members if isinstance(source, HypothesisClass) else source
        self.enum = FlatEnum(factory)
        self.capped = capped
        self.search_cap = search_cap
        self.name = name or ("enumeration" if capped else "least_consistent")
        if not capped:
            self.total_on = "realizable-only"
        self._state: Optional[_StreamState] = None

    # -- incremental state ---------------------------------------------------

    def _sync(self, sample: Sample) -> _StreamState:
        n = len(sample)
        st = self._state
        if st is None or st.backing is not sample.backing() or st.n > n:
            st = _StreamState(sample.backing())
            self._state = st
        for i in range(st.n, n):
            x, y = st.backing[i]
            st.xs.push(x)
            st.ys.push(y)
        st.n = n
        return st

    def _index_for(self, sample: Sample) -> int:
        n = len(sample)
        st = self._sync(sample)
        if self.capped and st.floor >= n:
            # every index below |S| is dead: the fallback index is |S|
            return n
        avail = self.enum.ensure(st.floor + 1)
        if avail <= st.floor:
            if self.capped:
                if not avail:
                    raise SearchExhausted("empty enumeration")
                return avail - 1  # finite enumeration shorter than the sample
            raise SearchExhausted(
                f"no consistent hypothesis among all {avail} enumerated")
        h = self.enum.hyps[st.floor]
        alive = all(
            evaluate(h, int(st.xs.arr[t])) == int(st.ys.arr[t])
            for t in range(st.checked, st.n)
        )
        if alive:
            st.checked = st.n
            return st.floor
        if self.capped:
            r = self.enum.scan(st.xs.arr, st.ys.arr, st.n, st.floor + 1, n)
            if r >= 0:
                st.floor, st.checked = r, st.n
                return r
            st.floor, st.checked = n, 0
            return n
        # uncapped: widen the scan geometrically up to the search cap
        lo = st.floor + 1
        while lo < self.search_cap:
            hi = min(self.search_cap, max(2 * lo, lo + 64))
            r = self.enum.scan(st.xs.arr, st.ys.arr, st.n, lo, hi)
            if r >= 0:
                st.floor, st.checked = r, st.n
                return r
            lo = min(hi, self.enum.ensure(hi))
            st.floor, st.checked = lo, 0
            if self.enum.exhausted and len(self.enum.hyps) <= lo:
                raise SearchExhausted(
                    f"no consistent hypothesis among all {lo} enumerated")
        raise SearchExhausted(
            f"no consistent hypothesis in the first {self.search_cap}")

    # -- interface -----------------------------------------------------------

    def predict(self, sample, x, advice=None):
        return evaluate(self.selected(sample), x)

    def selected(self, sample) -> Hypothesis:
        """The hypothesis inducing L(sample, .)."""
        idx = self._index_for(sample)
        avail = self.enum.ensure(idx + 1)
        if avail <= idx:
            if not avail:
                raise SearchExhausted("empty enumeration")
            idx = avail - 1  # capped fallback ran past a finite enumeration
        return self.enum.hyps[idx]

    def selected_index(self, sample) -> int:
        return self._index_for(sample)


def enumeration_learner(source, capped: bool = True, search_cap: int = 20000,
                        name: Optional[str] = None) -> EnumerationLearner:
    """Least-consistent-index learner over an enumeration (or class members)."""
    return EnumerationLearner(source, capped=capped, search_cap=search_cap, name=name)


def class_learner(cls: HypothesisClass, capped: bool = True) -> EnumerationLearner:
    """The enumeration learner a class supports best: its closure
    enumeration when one exists, its member enumeration otherwise."""
    source = cls.closure_members if cls.closure_members is not None else cls.members
    return EnumerationLearner(source, capped=capped, name=f"enumeration({cls.name})")


def proper_learner(cls: HypothesisClass) -> EnumerationLearner:
    """Least consistent member of the closure enumeration.

    On every realizable sample the induced function is itself in the
    closure, hence realizable.
    """
    if cls.closure_members is None:
        raise ValueError(f"class {cls.name} has no closure enumeration")
    return EnumerationLearner(cls.closure_members, capped=False,
                              name=f"proper({cls.name})")


class EvilClassLearner(Learner):
    """The computable learner for the diagonal class.

    Predict 0 until the stream reveals a 1; the least 1-labeled point m
    then bounds the candidate set, and prediction follows the least
    candidate n <= m whose diagonal sequence is defined and consistent
    with the sample so far.
    """

    total_on = "realizable-only"

    def __init__(self, registry: LearnerRegistry, fuel: int = DEFAULT_FUEL):
        self.registry = registry
        self.name = "evil_class_learner"
        self._seqs = {n: EvilSequence(registry, n, fuel) for n in range(len(registry))}

    def predict(self, sample, x, advice=None):
        ones = [px for px, py in sample if py == 1]
        if not ones:
            return 0
        m = min(ones)
        horizon = max(x, max(px for px, _ in sample)) + 1
        for n in range(min(m, len(self.registry) - 1) + 1):
            seq = self._seqs[n]
            try:
                seq.prefix(horizon)
                if all(seq.bit(px) == py for px, py in sample):
                    return seq.bit(x)
            except UndefinedAt:
                continue
        raise SearchExhausted(f"no consistent diagonal candidate at or below {m}")


def evil_class_learner(registry: LearnerRegistry, fuel: int = DEFAULT_FUEL) -> EvilClassLearner:
    return EvilClassLearner(registry, fuel=fuel)


# ---------------------------------------------------------------------------
# exponentially weighted averaging with the doubling schedule


def block_of_round(t: int) -> tuple[int, int, int]:
    """(k, start, length) of the block containing global round t.

    Block k >= 1 covers rounds [2^k - 2, 2^k - 2 + 2^k).
    """
    k = (t + 2).bit_length() - 1
    return k, (1 << k) - 2, 1 << k


def block_learning_rate(k: int) -> float:
    """eta for a block of 2^k rounds over max(k, 2) experts."""
    return math.sqrt(8.0 * math.log(max(k, 2)) / (1 << k))


class WeightVector:
    """Per-expert mistake counts with exponential weights w = exp(-eta*L)."""

    def __init__(self, n: int, eta: float):
        self.losses = [0] * n
        self.eta = eta

    def record(self, erring: Iterable[int]) -> None:
        for i in erring:
            self.losses[i] += 1

    def weights(self) -> list:
        m = min(self.losses)
        return [math.exp(-self.eta * (loss - m)) for loss in self.losses]

    def probabilities(self) -> list:
        w = self.weights()
        total = sum(w)
        return [v / total for v in w]


def sample_expert(weights: Sequence[float], column: AdviceBits, max_bits: int = 96) -> int:
    """Pick the expert whose probability subinterval of [0,1) contains the
    real number the advice column encodes in binary.

    Cumulative boundaries follow expert index order and subintervals are
    half-open [C_{i-1}, C_i). Reading stops as soon as the dyadic interval
    of the bits seen so far fits inside one subinterval; advice sitting
    exactly on a boundary (a measure-zero set) falls back at the bit cap
    to the subinterval containing the truncated value, i.e. the lower
    expansion of a dyadic cutpoint resolves to the lower interval.
    """
    total = float(sum(weights))
    if total <= 0 or any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    cum = []
    acc = 0.0
    for w in weights:
        acc += w / total
        cum.append(acc)
    cum[-1] = 1.0
    r = 0.0
    width = 1.0
    for t in range(max_bits):
        i = bisect_right(cum, r)
        left = cum[i - 1] if i else 0.0
        if r + width <= cum[i] and r >= left:
            return i
        width /= 2
        r += width * column.bit(t)
    return bisect_right(cum, r)


class EwaDoubling(Learner):
    """Exponentially weighted sampling over a growing expert pool.

    Rounds are split into blocks of length 2^k; block k restarts the
    weights uniformly over the first min(k, pool) experts with the block's
    own learning rate. Each round samples one expert from the weight
    distribution using the round's advice column and plays its prediction.
    """

    randomized = True

    def __init__(self, experts: Sequence[Hypothesis], name: str = "ewa"):
        if not experts:
            raise ValueError("ewa needs at least one expert")
        self.experts = list(experts)
        self.name = name
        self._cache = None  # (backing, n, k, losses)
        self._preds: dict = {}  # (expert index, x) -> label; experts are immutable

    def _expert_label(self, i: int, x: int) -> int:
        key = (i, x)
        try:
            return self._preds[key]
        except KeyError:
            v = self._preds[key] = evaluate(self.experts[i], x)
            return v

    def _losses(self, sample: Sample, k: int, start: int, nact: int) -> list:
        backing = sample.backing()
        n = len(sample)
        cache = self._cache
        if (cache is not None and cache[0] is backing and cache[2] == k
                and start <= cache[1] <= n and len(cache[3]) == nact):
            losses = cache[3]
            lo = cache[1]
        else:
            losses = [0] * nact
            lo = start
        for t in range(lo, n):
            x, y = backing[t]
            for i in range(nact):
                if self._expert_label(i, x) != y:
                    losses[i] += 1
        self._cache = (backing, n, k, losses)
        return losses

    def active_experts(self, t: int) -> int:
        k, _, _ = block_of_round(t)
        return min(k, len(self.experts))

    def round_probabilities(self, sample: Sample) -> list:
        t = len(sample)
        k, start, _ = block_of_round(t)
        nact = min(k, len(self.experts))
        wv = WeightVector(nact, block_learning_rate(k))
        wv.losses = list(self._losses(sample, k, start, nact))
        return wv.probabilities()

    def predict(self, sample, x, advice=None):
        if advice is None:
            raise ValueError("ewa is randomized and needs an advice stream")
        t = len(sample)
        probs = self.round_probabilities(sample)
        chosen = sample_expert(probs, advice.column(t))
        return self._expert_label(chosen, x)


def ewa_doubling(experts: Sequence[Hypothesis], name: str = "ewa") -> EwaDoubling:
    return EwaDoubling(experts, name=name)


# ---------------------------------------------------------------------------
# derandomization by majority over advice prefixes


def advice_majority(learner: Learner, sample: Sample, x: int, tau: Fraction,
                    depth_cap: int = 24) -> int:
    """Majority prediction over advice assignments, level-synchronized.

    Simulates the learner on all advice assignments breadth-first until
    runs covering advice mass >= tau have halted, then returns the
    majority prediction over that halted mass (ties -> 0). Raises
    MassUnreachable if the depth cap is hit first.
    """
    votes = {0: Fraction(0), 1: Fraction(0)}
    halted = Fraction(0)
    frontier: list = [{}]
    depth = 0
    while True:
        pending = []
        for assignment in frontier:
            try:
                v = learner.predict(sample, x, advice=AssignedAdvice(assignment))
            except _NeedBit as nb:
                pending.append((assignment, nb.pos))
                continue
            votes[v] += Fraction(1, 2 ** len(assignment))
            halted += Fraction(1, 2 ** len(assignment))
        if halted >= tau:
            return 1 if votes[1] > votes[0] else 0
        if not pending:
            raise MassUnreachable("all advice runs halted below the target mass")
        if depth >= depth_cap:
            raise MassUnreachable(f"halting mass {halted} < {tau} at depth {depth_cap}")
        depth += 1
        frontier = []
        for assignment, pos in pending:
            for b in (0, 1):
                child = dict(assignment)
                child[pos] = b
                frontier.append(child)


class Derandomized(Learner):
    """Deterministic majority vote over a randomized learner's advice.

    On the k-th query (1-based, k = |sample| + 1) the halting-mass target
    is 1 - (k+1)^{-2}.
    """

    def __init__(self, inner: Learner, depth_cap: int = 24, name: Optional[str] = None):
        self.inner = inner
        self.depth_cap = depth_cap
        self.name = name or f"derand({inner.name})"

    def predict(self, sample, x, advice=None):
        k = len(sample) + 1
        tau = 1 - Fraction(1, (k + 1) ** 2)
        return advice_majority(self.inner, sample, x, tau, self.depth_cap)


def derandomize(learner: Learner, depth_cap: int = 24) -> Derandomized:
    return Derandomized(learner, depth_cap=depth_cap)


# ---------------------------------------------------------------------------
# learner registries (the desk-scale universe for the diagonal constructions)


def _entry_constant(bit: int) -> RegistryEntry:
    return RegistryEntry(
        name=f"constant{bit}",
        predict=lambda s, x: bit,
        steps=lambda s, x: len(s) + 1,
        total=True,
    )


def _entry_parity() -> RegistryEntry:
    return RegistryEntry(
        name="parity",
        predict=lambda s, x: len(s) % 2,
        steps=lambda s, x: len(s) + 1,
        total=True,
    )


def _entry_last_label() -> RegistryEntry:
    return RegistryEntry(
        name="last_label",
        predict=lambda s, x: s[-1][1] if len(s) else 0,
        steps=lambda s, x: 3,
        total=True,
    )


def _entry_stall() -> RegistryEntry:
    return RegistryEntry(
        name="stall",
        predict=lambda s, x: 0,  # unreachable: steps never grants a halt
        steps=lambda s, x: None,
        total=False,
    )


def _entry_slow_constant0() -> RegistryEntry:
    return RegistryEntry(
        name="slow_constant0",
        predict=lambda s, x: 0,
        steps=lambda s, x: (len(s) + 1) ** 2 + 100,
        total=True,
    )


REGISTRY_CONSTRUCTORS = {
    "constant0": lambda: _entry_constant(0),
    "constant1": lambda: _entry_constant(1),
    "parity": _entry_parity,
    "last_label": _entry_last_label,
    "stall": _entry_stall,
    "slow_constant0": _entry_slow_constant0,
}


def default_registry() -> LearnerRegistry:
    return LearnerRegistry(tuple(
        REGISTRY_CONSTRUCTORS[name]()
        for name in ("constant0", "constant1", "parity", "last_label",
                     "stall", "slow_constant0")
    ))


def load_registry(path: str) -> LearnerRegistry:
    """Registry file: one '<constructor> <total|unknown>' line per entry."""
    entries = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            name, flag = line.split()
            if flag not in ("total", "unknown"):
                raise ValueError(f"bad totality flag {flag!r}")
            entry = REGISTRY_CONSTRUCTORS[name]()
            entry.total = flag == "total"
            entries.append(entry)
    return LearnerRegistry(tuple(entries))
