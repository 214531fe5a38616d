"""Core oracles: consistency, realizability, closure, Baire, forcing."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uolsim import classes, core, learners
from uolsim.classes import singleton_hypothesis
from uolsim.core import Sample
from uolsim.progmodel import EventuallyConstant


def zeros():
    return core.Hypothesis(EventuallyConstant("", 0), name="zeros")


def word_hyp(w, tail=0):
    return core.Hypothesis(EventuallyConstant(w, tail))


class TestSampleType:
    def test_serialization_roundtrip(self):
        s = Sample([(3, 0), (5, 1), (3, 0)])
        assert s.format() == "3:0,5:1,3:0"
        assert Sample.parse(s.format()) == s
        assert Sample.parse("") == Sample()

    def test_append_shares_backing(self):
        s0 = Sample()
        s1 = s0.append(1, 0)
        s2 = s1.append(2, 1)
        assert s1.backing_key() == s2.backing_key()
        assert list(s1) == [(1, 0)]  # older view unaffected
        assert list(s2) == [(1, 0), (2, 1)]

    def test_append_to_truncated_view_forks(self):
        s1 = Sample([(1, 0)])
        s2 = s1.append(2, 0)
        s1b = s1.append(9, 1)  # second append to the same prefix
        assert list(s2) == [(1, 0), (2, 0)]
        assert list(s1b) == [(1, 0), (9, 1)]

    def test_labeled_point_invariant(self):
        with pytest.raises(ValueError):
            core.LabeledPoint(3, -1)


class TestEvaluateAndConsistent:
    def test_singleton_examples(self):
        h = singleton_hypothesis(7)
        assert core.evaluate(h, 7) == 1
        assert core.evaluate(h, 3) == 0

    def test_eventually_constant_lookup(self):
        assert core.evaluate(word_hyp("010"), 1) == 1

    def test_consistency_examples(self):
        h = singleton_hypothesis(7)
        assert core.consistent(Sample([(3, 0), (5, 0)]), h)
        assert core.consistent(Sample(), h)
        assert not core.consistent(Sample([(2, 1), (2, 0)]), h)

    @settings(max_examples=100)
    @given(
        st.lists(st.tuples(st.integers(0, 30), st.integers(0, 1)), max_size=12),
        st.tuples(st.integers(0, 30), st.integers(0, 1)),
        st.integers(0, 600),
    )
    def test_consistency_monotone_under_extension(self, pts, extra, e):
        from uolsim import progmodel

        h = core.Hypothesis(progmodel.decode(e))
        if isinstance(h.body, progmodel.Machine):
            return  # totality not guaranteed off the structural fragment
        s = Sample(pts)
        if core.consistent(s.append(*extra), h):
            assert core.consistent(s, h)


class TestIsRealizable:
    def test_examples_from_singletons(self):
        S = classes.singletons()
        assert core.is_realizable(Sample([(2, 1), (4, 1)]), S).verdict == "no"
        ans = core.is_realizable(Sample([(2, 1)]), S)
        assert ans.verdict == "yes"
        assert core.evaluate(ans.witness, 2) == 1
        assert core.is_realizable(Sample(), S).verdict == "yes"

    def test_budgeted_enumeration_paths(self):
        hyps = [singleton_hypothesis(k) for k in range(4)]
        cls = core.HypothesisClass("bare", "enumerated", lambda: iter(hyps))
        assert core.is_realizable(Sample([(0, 1)]), cls, budget=10).verdict == "yes"
        # budget exhaustion stays unknown, never a false negative
        assert core.is_realizable(Sample([(9, 1)]), cls, budget=2).verdict == "unknown"

    def test_explicit_finite_exhaustion_is_exact(self):
        cls = classes.explicit_finite([singleton_hypothesis(k) for k in range(4)])
        assert core.is_realizable(Sample([(9, 1)]), cls).verdict == "no"

    def test_budget_precondition(self):
        with pytest.raises(ValueError):
            core.is_realizable(Sample(), classes.singletons(), budget=0)

    @settings(max_examples=60)
    @given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 1)), max_size=8))
    def test_prefix_realizability(self, pts):
        for cls in (classes.singletons(), classes.thresholds_nat()):
            s = Sample(pts)
            if core.is_realizable(s, cls).is_yes:
                for n in range(len(pts)):
                    assert core.is_realizable(Sample(pts[:n]), cls).is_yes


def brute_closure_words(cls, length, enum_budget=64):
    """Independent oracle: member truncations up to `length` (the enumeration
    prefix is exhaustive for every builtin at desk sizes) plus constant limits."""
    words = set()
    for h in itertools.islice(cls.enumerate(), enum_budget):
        words.add(h.word(length))
    if cls.name == "singletons":
        words.add("0" * length)
    elif cls.name == "thresholds_nat":
        words.add("0" * length)
    elif cls.name == "thresholds_int":
        words.add("0" * length)
        words.add("1" * length)
    elif cls.name == "finite_support":
        words = {"".join(w) for w in itertools.product("01", repeat=length)}
    return {w[:n] for w in words for n in range(length + 1)}


class TestClosureExtendable:
    def test_singletons_examples(self):
        S = classes.singletons()
        assert core.closure_extendable(S, "000").is_yes
        assert core.closure_extendable(S, "0110").verdict == "no"

    def test_derived_brute_force_small(self):
        # exhaustive cross-check of the exact oracles at length <= 7
        for cls in (classes.singletons(), classes.finite_support(),
                    classes.thresholds_nat(), classes.thresholds_int()):
            good = brute_closure_words(cls, 7, enum_budget=200)
            for n in range(8):
                for bits in itertools.product("01", repeat=n):
                    w = "".join(bits)
                    expect = "yes" if w in good else "no"
                    assert core.closure_extendable(cls, w).verdict == expect, (cls.name, w)

    def test_evil_prefixes_extendable(self):
        R = learners.default_registry()
        E = classes.evil_class(R)
        for n in R.total_indices():
            w = "0" * n + "1"
            ans = core.closure_extendable(E, w)
            assert ans.is_yes

    def test_budgeted_path_returns_unknown(self):
        hyps = [singleton_hypothesis(k) for k in range(8)]
        cls = core.HypothesisClass("bare", "enumerated", lambda: iter(hyps))
        assert core.closure_extendable(cls, "01", budget=1).verdict == "unknown"
        assert core.closure_extendable(cls, "01", budget=8).verdict == "yes"

    def test_horizon_precondition(self):
        with pytest.raises(ValueError):
            core.closure_extendable(classes.singletons(), "0101", horizon=2)

    def test_closure_words_match_sample_realizability(self):
        # a full-coverage sample over {0..L-1} is the same query as its word
        for cls in (classes.singletons(), classes.thresholds_nat(),
                    classes.thresholds_int(), classes.finite_support()):
            for n in range(5):
                for bits in itertools.product("01", repeat=n):
                    w = "".join(bits)
                    via_word = core.closure_extendable(cls, w).is_yes
                    via_sample = core.is_realizable(Sample.from_word(w), cls).is_yes
                    assert via_word == via_sample, (cls.name, w)


class TestBaireDistance:
    def test_identical_arguments(self):
        h = singleton_hypothesis(3)
        d = core.baire_distance(h, h, 100)
        assert d.value == 0 and not d.horizon_limited

    def test_first_disagreement_at_four(self):
        d = core.baire_distance(zeros(), singleton_hypothesis(4), 100)
        assert d.value == Fraction(1, 4)
        assert d.first_disagreement == 4

    def test_disagreement_at_zero_maps_to_sentinel(self):
        d = core.baire_distance(singleton_hypothesis(0), zeros(), 100)
        assert d.value == core.BAIRE_INDEX0 == Fraction(2)
        assert d.first_disagreement == 0

    def test_equal_within_horizon_is_flagged(self):
        d = core.baire_distance(zeros(), singleton_hypothesis(50), 10)
        assert d.value == 0 and d.horizon_limited

    @settings(max_examples=80)
    @given(st.integers(0, 300), st.integers(0, 300), st.integers(0, 300))
    def test_symmetry_and_ultrametric(self, a, b, c):
        f = word_hyp(format(a, "09b"))
        g = word_hyp(format(b, "09b"))
        h = word_hyp(format(c, "09b"))
        dfg = core.baire_distance(f, g, 20)
        dgf = core.baire_distance(g, f, 20)
        assert dfg.value == dgf.value
        dfh = core.baire_distance(f, h, 20)
        dgh = core.baire_distance(g, h, 20)
        if not (dfg.horizon_limited or dgh.horizon_limited or dfh.horizon_limited):
            assert dfh.value <= max(dfg.value, dgh.value)


class TestForcingSample:
    def test_single_hypothesis_class_agrees_immediately(self):
        cls = classes.explicit_finite([singleton_hypothesis(2)])
        L = learners.enumeration_learner(cls.members, capped=False)
        res = core.forcing_sample(L, singleton_hypothesis(2), 5, 30)
        assert not res.exhausted and len(res.sample) == 0

    def test_one_disagreement_forces_the_switch(self):
        # least-consistent learner over the closure enumeration, zeros first
        L = learners.proper_learner(classes.singletons())
        res = core.forcing_sample(L, singleton_hypothesis(2), 10, 40)
        assert not res.exhausted
        assert list(res.sample) == [(2, 1)]

    def test_constant_predictor_exhausts(self):
        res = core.forcing_sample(learners.constant_learner(0),
                                  singleton_hypothesis(5), 7, 40)
        assert res.exhausted
        # the loop keeps re-forcing the same disagreement point
        assert set(res.sample) == {(5, 1)}
