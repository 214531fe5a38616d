"""uolsim: a simulator for universal online learning of binary hypotheses on N.

Runs the learner/adversary prediction game, ships the concrete hypothesis
classes, learners, and adversaries needed to exercise finite-mistake,
regret, and separation phenomena at desk scale, and keeps every run
reproducible from an explicit seed.
"""

from .backend import backend_name
from .core import (
    BaireDistance,
    ExtendabilityAnswer,
    ForcingResult,
    Hypothesis,
    HypothesisClass,
    LabeledPoint,
    Sample,
    SearchExhausted,
    baire_distance,
    closure_extendable,
    consistent,
    evaluate,
    forcing_sample,
    is_realizable,
)
from .progmodel import (
    DEFAULT_FUEL,
    EventuallyConstant,
    FiniteTable,
    FuelExhausted,
    LearnerRegistry,
    Machine,
    RegistryEntry,
    Threshold,
    decode,
    encode,
    eval_bounded,
    enumerate_ce,
    make_eventually_constant,
)

__version__ = "0.1.0"

__all__ = [
    "BaireDistance",
    "DEFAULT_FUEL",
    "EventuallyConstant",
    "ExtendabilityAnswer",
    "FiniteTable",
    "ForcingResult",
    "FuelExhausted",
    "Hypothesis",
    "HypothesisClass",
    "LabeledPoint",
    "LearnerRegistry",
    "Machine",
    "RegistryEntry",
    "Sample",
    "SearchExhausted",
    "Threshold",
    "backend_name",
    "baire_distance",
    "closure_extendable",
    "consistent",
    "decode",
    "encode",
    "enumerate_ce",
    "eval_bounded",
    "evaluate",
    "forcing_sample",
    "is_realizable",
    "make_eventually_constant",
]
