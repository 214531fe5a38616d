"""Numbering, step-bounded evaluation, and the mini-language interpreter."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uolsim import progmodel as pm


def small_terms():
    """A deterministic pool of structurally varied terms for roundtrips."""
    terms = []
    for prefix in ("", "0", "1", "01", "110", "0010"):
        for tail in (0, 1):
            terms.append(pm.EventuallyConstant(prefix, tail))
    for cut in range(6):
        terms.append(pm.Threshold("nat", cut))
    for cut in range(-4, 5):
        terms.append(pm.Threshold("int", cut))
    for keys in ((), (0,), (3,), (1, 4), (0, 2, 7)):
        for default in (0, 1):
            terms.append(pm.FiniteTable(tuple((k, 1 - default) for k in keys), default))
    terms.append(pm.Machine(()))
    terms.append(pm.Machine((pm.Inc(1),)))
    terms.append(pm.Machine((pm.While(0, (pm.Dec(0),)), pm.Inc(1))))
    terms.append(pm.Machine((pm.While(2, (pm.Inc(1), pm.Dec(2))), pm.Inc(3))))
    return terms


class TestNumbering:
    def test_all_zeros_program_has_index_zero(self):
        assert pm.encode(pm.EventuallyConstant("", 0)) == 0

    def test_decode_initial_segment_reencodes(self):
        for e in range(10_000):
            assert pm.encode(pm.decode(e)) == e

    def test_roundtrip_on_term_pool(self):
        for term in small_terms():
            assert pm.decode(pm.encode(term)) == term

    @given(st.integers(min_value=0, max_value=10**12))
    def test_surjective_everywhere_sampled(self, e):
        assert pm.encode(pm.decode(e)) == e

    def test_singleton_generator_golden_prefix(self):
        gen = pm.singleton_index_generator()
        indices = [next(gen) for _ in range(5)]
        # pinned once from the chosen pairing; independently recomputed here
        assert indices == [18, 58, 130, 234, 370]
        assert indices == [pm.encode(pm.singleton_table(p)) for p in range(5)]

    def test_pairing_bijection(self):
        seen = {}
        for a in range(40):
            for b in range(40):
                z = pm.pair(a, b)
                assert z not in seen
                seen[z] = (a, b)
                assert pm.unpair(z) == (a, b)

    def test_zigzag_bijection(self):
        zs = [pm.nat_to_int(n) for n in range(11)]
        assert zs == [0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5]
        for n in range(200):
            assert pm.int_to_nat(pm.nat_to_int(n)) == n

    def test_non_binary_table_is_outside_numbering(self):
        with pytest.raises(ValueError):
            pm.encode(pm.FiniteTable(((0, 3),), 1))


class TestEvaluation:
    def test_eventually_constant_lookup(self):
        ec = pm.EventuallyConstant("010", 0)
        assert [pm.eval_term(ec, x) for x in range(5)] == [0, 1, 0, 0, 0]

    def test_threshold_convention_matches_brute_table(self):
        # h(x) = 1 iff x >= cut, checked against an explicit table
        for cut in range(6):
            th = pm.Threshold("nat", cut)
            table = [1 if x >= cut else 0 for x in range(12)]
            assert [pm.eval_term(th, x) for x in range(12)] == table
        assert pm.eval_bounded(pm.encode(pm.Threshold("nat", 5)), 5, 1000) == ("halted", 1)

    def test_int_threshold_uses_zigzag(self):
        th = pm.Threshold("int", -1)
        # positions 0,1,2,3,4 carry z-values 0,1,-1,2,-2
        assert [pm.eval_term(th, x) for x in range(5)] == [1, 1, 1, 1, 0]

    def test_machine_countdown_steps_exact(self):
        m = pm.Machine((pm.While(0, (pm.Dec(0),)), pm.Inc(1)))
        halted, value, steps = pm.run_machine(m, 3, 1000)
        # guard test x+1 times, dec x times, inc once
        assert (halted, value, steps) == (True, 1, 8)

    def test_eval_bounded_monotone_and_value_stable(self):
        m = pm.Machine((pm.While(0, (pm.Dec(0),)), pm.Inc(1)))
        results = [pm.eval_bounded(m, 3, s) for s in range(0, 20)]
        halted_at = [s for s, r in zip(range(20), results) if r[0] == "halted"]
        assert halted_at and min(halted_at) == 8
        assert all(results[s] == ("halted", 1) for s in halted_at)
        assert all(results[s] == ("running", None) for s in range(min(halted_at)))

    def test_diverging_machine_reports_running(self):
        loop = pm.Machine((pm.Inc(2), pm.While(2, (pm.Inc(2),))))
        assert pm.eval_bounded(pm.encode(loop), 0, 50_000) == ("running", None)
        with pytest.raises(pm.FuelExhausted):
            pm.eval_term(loop, 0, fuel=1000)

    def test_structural_terms_halt_within_cost_model(self):
        for term in small_terms():
            if isinstance(term, pm.Machine):
                continue
            for x in range(20):
                cost = pm.term_steps(term, x)
                assert cost is not None
                assert pm.eval_bounded(term, x, cost) == ("halted", pm.eval_term(term, x))
                if cost > 0:
                    assert pm.eval_bounded(term, x, cost - 1) == ("running", None)

    @settings(max_examples=60)
    @given(st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=400))
    def test_bounded_monotone_on_decoded_programs(self, x, e):
        term = pm.decode(e)
        prev = ("running", None)
        for s in (0, 1, 2, 4, 8, 16, 64, 256):
            cur = pm.eval_bounded(term, x, s)
            if prev[0] == "halted":
                assert cur == prev
            prev = cur


class TestMakeEventuallyConstant:
    def test_prefix_then_tail(self):
        e = pm.make_eventually_constant("001", 0)
        term = pm.decode(e)
        assert [pm.eval_term(term, x) for x in range(6)] == [0, 0, 1, 0, 0, 0]

    def test_tail_one(self):
        term = pm.decode(pm.make_eventually_constant("0", 1))
        assert [pm.eval_term(term, x) for x in range(4)] == [0, 1, 1, 1]

    def test_empty_prefix_is_all_zeros(self):
        term = pm.decode(pm.make_eventually_constant("", 0))
        assert all(pm.eval_term(term, x) == 0 for x in range(10))


class TestEnumerateCe:
    def test_prefix_of_singletons(self):
        out = pm.enumerate_ce(pm.singleton_index_generator, 5)
        assert out == [pm.encode(pm.singleton_table(p)) for p in range(5)]

    def test_empty_generator(self):
        assert pm.enumerate_ce(lambda: iter(()), 100) == []

    def test_prefix_stable_over_budgets(self):
        runs = [pm.enumerate_ce(pm.finite_support_index_generator, n) for n in (10, 100, 1000)]
        assert runs[0] == runs[1][: len(runs[0])]
        assert runs[1] == runs[2][: len(runs[1])]

    def test_none_steps_are_internal_work(self):
        def gen():
            for i in range(10):
                yield None
                yield i

        assert pm.enumerate_ce(gen, 7) == [0, 1, 2]


class TestSurfaceSyntax:
    @pytest.mark.parametrize("term", small_terms())
    def test_roundtrip(self, term):
        assert pm.parse_term(pm.format_term(term)) == term

    def test_readable_forms(self):
        assert pm.format_term(pm.EventuallyConstant("", 1)) == "ec - 1"
        assert pm.parse_term("thr int -2") == pm.Threshold("int", -2)
        assert pm.parse_term("tab 3:1,5:0 0") == pm.FiniteTable(((3, 1), (5, 0)), 0)
        m = pm.parse_term("mach while 0 { dec 0 } ; inc 1")
        assert m == pm.Machine((pm.While(0, (pm.Dec(0),)), pm.Inc(1)))


class TestRegistryProbe:
    def test_probe_matches_step_budget(self):
        entry = pm.RegistryEntry("slow", lambda s, x: 1, lambda s, x: 10, total=True)
        from uolsim.core import Sample

        s = Sample()
        assert pm.probe(entry, s, 0, 9) is None
        assert pm.probe(entry, s, 0, 10) == 1

    def test_probe_never_halts(self):
        entry = pm.RegistryEntry("stall", lambda s, x: 0, lambda s, x: None, total=False)
        from uolsim.core import Sample

        assert pm.probe(entry, Sample(), 0, 10**9) is None
