"""Adversary strategies for the prediction game.

An adversary picks the round's point before seeing the prediction and
reveals the label after (the game's protocol order). Instances are
stateful per game; the engine always plays against a ``fresh()`` copy,
so a constructed adversary is a reusable specification.
"""

from __future__ import annotations

from typing import Callable, Iterator, Optional

from .classes import EvilSequence
from .core import Hypothesis, HypothesisClass, RealizabilityMonitor, evaluate
from .learners import _GOLDEN, _MASK64, _splitmix64
from .progmodel import DEFAULT_FUEL, LearnerRegistry, pair


def identity_order() -> Iterator[int]:
    x = 0
    while True:
        yield x
        x += 1


def cyclic_order(n: int) -> Callable[[], Iterator[int]]:
    def gen():
        x = 0
        while True:
            yield x % n
            x += 1

    return gen


class Adversary:
    """Base strategy: next_point before the prediction, reveal after it."""

    realizable_contract = False
    name = "adversary"
    audit_class: Optional[HypothesisClass] = None

    def next_point(self, transcript) -> int:
        raise NotImplementedError

    def reveal(self, transcript, prediction: int) -> int:
        raise NotImplementedError

    def fresh(self) -> "Adversary":
        raise NotImplementedError


class FixedTarget(Adversary):
    """Plays points in a fixed order and labels them by one target function.

    The target is expected to come from the closure of the declared class,
    which makes every revealed prefix realizable.
    """

    realizable_contract = True

    def __init__(self, target: Hypothesis, order: Optional[Callable[[], Iterator[int]]] = None,
                 audit_class: Optional[HypothesisClass] = None, name: Optional[str] = None):
        self.target = target
        self.order = order if order is not None else identity_order
        self.audit_class = audit_class
        self.name = name or f"fixed({target.name or 'target'})"
        self._points = self.order()
        self._x: Optional[int] = None

    def fresh(self):
        return FixedTarget(self.target, self.order, self.audit_class, self.name)

    def next_point(self, transcript):
        self._x = next(self._points)
        return self._x

    def reveal(self, transcript, prediction):
        return evaluate(self.target, self._x)


def fixed_target(target: Hypothesis, order=None, audit_class=None) -> FixedTarget:
    return FixedTarget(target, order=order, audit_class=audit_class)


class WorstCase(Adversary):
    """Maximally contrarian while staying realizable.

    Reveals the opposite of the prediction whenever the extended sample
    remains realizable by the class oracle; a budgeted oracle's unknown
    counts as not-realizable, preserving the contract at the cost of
    contrarian strength.
    """

    realizable_contract = True

    def __init__(self, cls: HypothesisClass, order=None, budget: int = 256):
        self.cls = cls
        self.order = order if order is not None else identity_order
        self.budget = budget
        self.audit_class = cls
        self.name = f"worst_case({cls.name})"
        self._points = self.order()
        self._monitor: RealizabilityMonitor = cls.monitor(budget)
        self._x: Optional[int] = None

    def fresh(self):
        return WorstCase(self.cls, self.order, self.budget)

    def next_point(self, transcript):
        self._x = next(self._points)
        return self._x

    def reveal(self, transcript, prediction):
        contrarian = 1 - prediction
        if self._monitor.query(self._x, contrarian).is_yes:
            y = contrarian
        else:
            y = prediction
        self._monitor.push(self._x, y)
        return y


def worst_case(cls: HypothesisClass, order=None, budget: int = 256) -> WorstCase:
    return WorstCase(cls, order=order, budget=budget)


def evil_adversary(n: int, registry: LearnerRegistry, fuel: int = DEFAULT_FUEL,
                   audit_class: Optional[HypothesisClass] = None) -> FixedTarget:
    """Plays 0,1,2,... labeled by the diagonal sequence of registry entry n."""
    seq = EvilSequence(registry, n, fuel)
    target = Hypothesis(seq.bit, name=f"evil[{n}]")
    return FixedTarget(target, order=identity_order, audit_class=audit_class,
                       name=f"evil_adversary[{n}]")


class AgnosticStream(Adversary):
    """Replays a generated (x, y) stream, ignoring predictions entirely."""

    realizable_contract = False

    def __init__(self, generator: Callable[[], Iterator[tuple]], name: str = "stream"):
        self.generator = generator
        self.name = name
        self._it = generator()
        self._y: Optional[int] = None

    def fresh(self):
        return AgnosticStream(self.generator, self.name)

    def next_point(self, transcript):
        x, y = next(self._it)
        self._y = y
        return x

    def reveal(self, transcript, prediction):
        return self._y


def agnostic_stream(generator, name: str = "stream") -> AgnosticStream:
    return AgnosticStream(generator, name=name)


def noisy_target_stream(target: Hypothesis, rate: float, seed: int,
                        order=None) -> AgnosticStream:
    """Fixed-target labels with independent label flips at the given rate.

    Round t flips with probability round(rate * 2^16) / 2^16, decided by
    16 bits of the seeded mix at position pair(t, 0), so the stream is a
    pure function of (target, rate, seed, order).
    """
    order = order if order is not None else identity_order
    threshold = round(rate * 65536)

    def gen():
        base = seed & _MASK64
        for t, x in enumerate(order()):
            word = _splitmix64((base + (pair(t, 0) + 1) * _GOLDEN) & _MASK64)
            y = evaluate(target, x)
            if (word >> 32) & 0xFFFF < threshold:
                y = 1 - y
            yield x, y

    return AgnosticStream(gen, name=f"noisy({target.name},{rate})")


def alternating_stream(x: int = 0) -> AgnosticStream:
    """Labels 0,1,0,1,... on one repeated point."""

    def gen():
        t = 0
        while True:
            yield x, t % 2
            t += 1

    return AgnosticStream(gen, name=f"alternating@{x}")
