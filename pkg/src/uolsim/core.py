"""Domain types and the consistency/realizability/closure oracles.

Everything here is an immutable value; the operations are pure functions
of their inputs. Binary words are ASCII strings of label characters
('0'/'1' for binary classes, '1'..'9' for multi-color classes); samples
serialize as comma-separated ``x:y`` pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional

from . import progmodel
from .progmodel import FuelExhausted, eval_term


class SearchExhausted(Exception):
    """An unbounded hypothesis search hit its configured cap.

    Surfaces the partial-learner phenomenon: a search that would diverge
    on a non-realizable input is reported instead of looping forever.
    """


@dataclass(frozen=True)
class LabeledPoint:
    x: int
    y: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise ValueError("points and labels are naturals")


class Sample:
    """An ordered finite sequence of labeled points.

    Immutable as a value; ``append`` shares a grow-only backing list so
    that streaming play (the engine appends one point per round) costs
    O(1) per round and lets learners key incremental caches on
    ``backing_key()``. Repeated x values are allowed, including with
    conflicting labels; realizability checks reject the conflicts.
    """

    __slots__ = ("_pts", "_n")

    def __init__(self, points=()):
        self._pts = [(int(x), int(y)) for x, y in points]
        self._n = len(self._pts)

    @classmethod
    def _view(cls, pts, n):
        s = cls.__new__(cls)
        s._pts = pts
        s._n = n
        return s

    @classmethod
    def from_word(cls, word: str) -> "Sample":
        return cls((i, int(c)) for i, c in enumerate(word))

    @classmethod
    def parse(cls, text: str) -> "Sample":
        text = text.strip()
        if not text:
            return cls()
        return cls(tuple(int(v) for v in item.split(":")) for item in text.split(","))

    def append(self, x: int, y: int) -> "Sample":
        if self._n == len(self._pts):
            self._pts.append((int(x), int(y)))
            return Sample._view(self._pts, self._n + 1)
        # appending to a truncated view: fork, leaving self untouched
        pts = self._pts[: self._n] + [(int(x), int(y))]
        return Sample._view(pts, self._n + 1)

    def backing_key(self):
        """Identity key for incremental caches; stable under append."""
        return id(self._pts)

    def backing(self):
        return self._pts

    def __len__(self):
        return self._n

    def __iter__(self):
        return iter(self._pts[: self._n])

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self._pts[: self._n][i]
        if i >= self._n or i < -self._n:
            raise IndexError(i)
        return self._pts[i if i >= 0 else self._n + i]

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return self._pts[: self._n] == other._pts[: other._n]

    __hash__ = None

    def format(self) -> str:
        return ",".join(f"{x}:{y}" for x, y in self)

    def __repr__(self):
        return f"Sample({self.format()!r})"


class Hypothesis:
    """A total labeled-point predictor: a program term or a plain callable.

    ``fuel`` is the per-evaluation step budget for machine-backed bodies;
    structurally total terms ignore it.
    """

    __slots__ = ("body", "fuel", "name", "_flat_cache")

    def __init__(self, body, fuel: Optional[int] = None, name: Optional[str] = None):
        self.body = body
        self.fuel = fuel
        self.name = name
        self._flat_cache = False  # not computed yet

    def __call__(self, x: int) -> int:
        return evaluate(self, x)

    def word(self, n: int) -> str:
        """The length-n prefix of the computed function, as a word."""
        return "".join(str(evaluate(self, x)) for x in range(n))

    def flat(self):
        """Flattened (kind, p0, aux tuple) for the kernel path, or None."""
        if self._flat_cache is False:
            self._flat_cache = _flatten(self.body)
        return self._flat_cache

    def __repr__(self):
        if self.name:
            return f"<hypothesis {self.name}>"
        if callable(self.body):
            return "<hypothesis (callable)>"
        return f"<hypothesis {progmodel.format_term(self.body)}>"


def _flatten(body):
    if isinstance(body, progmodel.EventuallyConstant):
        return (0, body.tail, tuple(int(c) for c in body.prefix))
    if isinstance(body, progmodel.Threshold):
        return (1 if body.kind == "nat" else 2, body.cut, ())
    if isinstance(body, progmodel.FiniteTable):
        aux = []
        for k, v in body.entries:
            aux.extend((k, v))
        return (3, body.default, tuple(aux))
    return None


def evaluate(h: Hypothesis, x: int) -> int:
    """h(x). Raises FuelExhausted when a machine body exceeds its budget."""
    if x < 0:
        raise ValueError("domain points are naturals")
    body = h.body
    if callable(body):
        return body(x)
    return eval_term(body, x, h.fuel)


def consistent(sample, h: Hypothesis) -> bool:
    """True iff h agrees with every labeled point of the sample."""
    return all(evaluate(h, x) == y for x, y in sample)


def evaluate_many(h: Hypothesis, xs) -> "np.ndarray":
    """h over an int64 array of points, vectorized for flattenable bodies."""
    import numpy as np

    xs = np.asarray(xs, dtype=np.int64)
    flat = h.flat()
    if flat is None:
        return np.array([evaluate(h, int(x)) for x in xs], dtype=np.int64)
    kind, p0, aux = flat
    if kind == 0:
        out = np.full(len(xs), p0, dtype=np.int64)
        if aux:
            prefix = np.asarray(aux, dtype=np.int64)
            mask = xs < len(aux)
            out[mask] = prefix[xs[mask]]
        return out
    if kind == 1:
        return (xs >= p0).astype(np.int64)
    if kind == 2:
        zs = np.where(xs & 1, (xs + 1) >> 1, -(xs >> 1))
        return (zs >= p0).astype(np.int64)
    out = np.full(len(xs), p0, dtype=np.int64)
    for key, value in zip(aux[0::2], aux[1::2]):
        out[xs == key] = value
    return out


@dataclass(frozen=True)
class ExtendabilityAnswer:
    """Three-valued oracle answer; 'no' is reserved for exact oracles."""

    verdict: str  # 'yes' | 'no' | 'unknown'
    witness: Optional[object] = None

    def __post_init__(self):
        if self.verdict not in ("yes", "no", "unknown"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "yes" and self.witness is None:
            raise ValueError("a yes answer requires a witness")

    @classmethod
    def yes(cls, witness) -> "ExtendabilityAnswer":
        return cls("yes", witness)

    @classmethod
    def no(cls) -> "ExtendabilityAnswer":
        return cls("no")

    @classmethod
    def unknown(cls) -> "ExtendabilityAnswer":
        return cls("unknown")

    @property
    def is_yes(self):
        return self.verdict == "yes"

    @property
    def is_no(self):
        return self.verdict == "no"


class RealizabilityMonitor:
    """Incremental per-stream realizability oracle.

    ``query(x, y)`` answers whether the committed sample extended by
    (x, y) stays realizable; ``push(x, y)`` commits the point. Exact
    class-specific monitors answer in O(1)-ish per round; the generic
    budgeted monitor re-enumerates.
    """

    def query(self, x: int, y: int) -> ExtendabilityAnswer:
        raise NotImplementedError

    def push(self, x: int, y: int) -> None:
        raise NotImplementedError


class BudgetedMonitor(RealizabilityMonitor):
    def __init__(self, cls: "HypothesisClass", budget: int = 256):
        self.cls = cls
        self.budget = budget
        self.sample = Sample()

    def query(self, x, y):
        return is_realizable(self.sample.append(x, y), self.cls, self.budget)

    def push(self, x, y):
        self.sample = self.sample.append(x, y)


@dataclass
class HypothesisClass:
    """An enumerable family of hypotheses plus its strongest oracles.

    ``members`` is an enumerator factory yielding z_0, z_1, ...; exact
    oracles (word extendability, sample realizability, the incremental
    monitor, a closure enumeration) are optional and None when only
    budgeted answers are available.
    """

    name: str
    kind: str  # 'explicit-finite' | 'enumerated' | 'builtin'
    members: Callable[[], Iterator[Hypothesis]]
    label_arity: int = 2
    word_extendable: Optional[Callable[[str], ExtendabilityAnswer]] = None
    sample_realizable: Optional[Callable[[Sample], ExtendabilityAnswer]] = None
    closure_members: Optional[Callable[[], Iterator[Hypothesis]]] = None
    monitor_factory: Optional[Callable[[], RealizabilityMonitor]] = None
    size: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("explicit-finite", "enumerated", "builtin"):
            raise ValueError(f"bad class kind {self.kind!r}")

    def enumerate(self) -> Iterator[Hypothesis]:
        return self.members()

    def enumerate_closure(self) -> Iterator[Hypothesis]:
        if self.closure_members is None:
            raise ValueError(f"class {self.name} has no closure enumeration")
        return self.closure_members()

    def monitor(self, budget: int = 256) -> RealizabilityMonitor:
        if self.monitor_factory is not None:
            return self.monitor_factory()
        return BudgetedMonitor(self, budget)


def is_realizable(sample, cls: HypothesisClass, budget: int = 256) -> ExtendabilityAnswer:
    """Is some class member consistent with the sample?

    Exact when the class carries a sample oracle or is explicit-finite
    and exhausted within budget; otherwise yes-with-witness or unknown.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if cls.sample_realizable is not None:
        return cls.sample_realizable(sample)
    points = list(sample)
    seen = 0
    for h in cls.enumerate():
        if seen >= budget:
            return ExtendabilityAnswer.unknown()
        seen += 1
        if all(evaluate(h, x) == y for x, y in points):
            return ExtendabilityAnswer.yes(h)
    if cls.kind == "explicit-finite" and (cls.size is None or seen >= cls.size):
        return ExtendabilityAnswer.no()
    return ExtendabilityAnswer.unknown()


def closure_extendable(cls: HypothesisClass, word: str, horizon: Optional[int] = None,
                       budget: Optional[int] = None) -> ExtendabilityAnswer:
    """Is ``word`` a prefix of some member of the class closure?

    Equivalent to realizability of the initial-segment sample
    ((0, w0), ..., (|w|-1, w_{|w|-1})). Exact for classes with a word
    oracle; budgeted member enumeration otherwise.
    """
    horizon = len(word) if horizon is None else horizon
    if horizon < len(word):
        raise ValueError("horizon must cover the word")
    if cls.word_extendable is not None:
        return cls.word_extendable(word)
    budget = max(64, horizon) if budget is None else budget
    seen = 0
    for h in cls.enumerate():
        if seen >= budget:
            return ExtendabilityAnswer.unknown()
        seen += 1
        if all(evaluate(h, x) == int(c) for x, c in enumerate(word)):
            return ExtendabilityAnswer.yes(h)
    if cls.kind == "explicit-finite" and (cls.size is None or seen >= cls.size):
        return ExtendabilityAnswer.no()
    return ExtendabilityAnswer.unknown()


# Baire distance at first-disagreement index 0 is undefined by the 1/mu(x)
# formula; 2 sits strictly above every 1/k, preserving comparison order.
BAIRE_INDEX0 = Fraction(2)


@dataclass(frozen=True)
class BaireDistance:
    value: Fraction
    first_disagreement: Optional[int]
    horizon_limited: bool


def baire_distance(f: Hypothesis, g: Hypothesis, horizon: int) -> BaireDistance:
    """1/(least disagreement index) within [0, horizon); 0 when none found.

    A zero from scanning the whole horizon without disagreement is tagged
    horizon_limited (total equality is undecidable for machine bodies).
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if f is g:
        return BaireDistance(Fraction(0), None, False)
    for x in range(horizon):
        if evaluate(f, x) != evaluate(g, x):
            return BaireDistance(BAIRE_INDEX0 if x == 0 else Fraction(1, x), x, False)
    return BaireDistance(Fraction(0), None, True)


@dataclass(frozen=True)
class ForcingResult:
    sample: Sample
    exhausted: bool
    rounds: int


def forcing_sample(learner, h: Hypothesis, max_rounds: int, horizon: int) -> ForcingResult:
    """Grow a sample on which the learner's induced function equals h.

    Repeatedly extends by (x, h(x)) at the least point below horizon where
    the learner disagrees with h; stops when the induced function matches
    h on [0, horizon) or after max_rounds extensions (exhausted).
    """
    sample = Sample()
    for r in range(max_rounds + 1):
        x_bad = None
        for x in range(horizon):
            if learner.predict(sample, x) != evaluate(h, x):
                x_bad = x
                break
        if x_bad is None:
            return ForcingResult(sample, False, r)
        if r == max_rounds:
            break
        sample = sample.append(x_bad, evaluate(h, x_bad))
    return ForcingResult(sample, True, max_rounds)


def word_sample(word: str) -> Sample:
    """The initial-segment sample of a word."""
    return Sample.from_word(word)
