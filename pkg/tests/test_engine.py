"""Protocol enforcement, transcripts, regret accounting, Monte Carlo."""

import numpy as np
import pytest

from uolsim import adversaries, classes, core, engine, learners
from uolsim.classes import singleton_hypothesis
from uolsim.progmodel import EventuallyConstant, Machine, While, Inc, Dec


class TestRunGame:
    def test_enumeration_vs_fixed_singleton(self):
        cls = classes.singletons()
        L = learners.class_learner(cls)
        adv = adversaries.fixed_target(singleton_hypothesis(5), audit_class=cls)
        t = engine.run_game(L, adv, 10)
        assert t.mistakes() <= 1

    def test_worst_case_forces_every_round(self):
        fs = classes.finite_support()
        t = engine.run_game(learners.class_learner(fs), adversaries.worst_case(fs), 25)
        assert [r.mistake for r in t.rounds] == [1] * 25

    def test_zero_rounds_rejected(self):
        with pytest.raises(ValueError):
            engine.run_game(learners.constant_learner(0),
                            adversaries.alternating_stream(0), 0)

    def test_protocol_order_prediction_before_reveal(self):
        seen = []

        class Spy(adversaries.Adversary):
            realizable_contract = False
            name = "spy"

            def fresh(self):
                return self

            def next_point(self, transcript):
                seen.append(("point", len(transcript.rounds)))
                return len(transcript.rounds)

            def reveal(self, transcript, prediction):
                # the revealed round must not be on the transcript yet
                seen.append(("reveal", len(transcript.rounds), prediction))
                return 0

        class SpyLearner(learners.Learner):
            name = "spylearner"

            def predict(self, sample, x, advice=None):
                seen.append(("predict", len(sample)))
                return 0

        engine.run_game(SpyLearner(), Spy(), 3)
        assert seen == [
            ("point", 0), ("predict", 0), ("reveal", 0, 0),
            ("point", 1), ("predict", 1), ("reveal", 1, 0),
            ("point", 2), ("predict", 2), ("reveal", 2, 0),
        ]

    def test_bit_identical_determinism(self):
        cls = classes.singletons()
        pool = [h for h, _ in zip(cls.enumerate_closure(), range(6))]
        L = learners.ewa_doubling(pool)
        adv = adversaries.noisy_target_stream(singleton_hypothesis(2), 0.1, seed=5)
        t1 = engine.run_game(L, adv, 64, seed=17)
        t2 = engine.run_game(L, adv, 64, seed=17)
        assert t1.to_lines() == t2.to_lines()

    def test_mistake_rate_series(self):
        adv = adversaries.alternating_stream(0)
        t = engine.run_game(learners.constant_learner(0), adv, 10)
        for i, r in enumerate(t.rounds):
            assert t.mistake_rate(i) == r.cum_mistakes / (i + 1)

    def test_fuel_abort_is_partial_transcript(self):
        stuck = Machine((Inc(2), While(2, (Inc(2),))))

        class MachineLearner(learners.Learner):
            name = "machine"

            def predict(self, sample, x, advice=None):
                return core.evaluate(core.Hypothesis(stuck, fuel=100), x)

        t = engine.run_game(MachineLearner(), adversaries.alternating_stream(0), 5)
        assert t.aborted and "FuelExhausted" in t.abort_reason
        assert t.rounds == []

    def test_global_fuel_cap(self):
        countdown = Machine((While(0, (Dec(0),)), Inc(1)))

        class MachineLearner(learners.Learner):
            name = "machine"

            def predict(self, sample, x, advice=None):
                return core.evaluate(core.Hypothesis(countdown, fuel=10**6), x)

        t = engine.run_game(MachineLearner(),
                            adversaries.fixed_target(singleton_hypothesis(3)), 50,
                            fuel=40)
        assert t.aborted and "fuel cap" in t.abort_reason
        assert 0 < len(t.rounds) < 50
        assert t.fuel_spent > 40

    def test_transcript_serialization_fields(self):
        adv = adversaries.fixed_target(singleton_hypothesis(1),
                                       audit_class=classes.singletons())
        t = engine.run_game(learners.constant_learner(0), adv, 3)
        lines = t.to_lines()
        assert lines[1].split("\t") == ["1", "1", "0", "1", "1", "1", "yes"]


class TestRegretReport:
    def test_perfect_learner_nonpositive_regret(self):
        cls = classes.singletons()
        target = singleton_hypothesis(4)
        follow = learners.FnLearner(lambda s, x: core.evaluate(target, x), "oracle")
        t = engine.run_game(follow, adversaries.fixed_target(target), 40)
        pool_without = [singleton_hypothesis(k) for k in range(4)]
        rep = engine.regret_report(t, pool_without)
        assert (rep.regret <= 0).all()
        pool_with = pool_without + [target]
        rep2 = engine.regret_report(t, pool_with)
        assert (rep2.regret == 0).all()  # target in the pool: best loss matches

    def test_alternating_best_loss_direct_count(self):
        adv = adversaries.alternating_stream(0)
        t = engine.run_game(learners.constant_learner(0), adv, 17)
        pool = [core.Hypothesis(EventuallyConstant("", 0)),
                core.Hypothesis(EventuallyConstant("", 1))]
        rep = engine.regret_report(t, pool)
        labels = [r.y for r in t.rounds]
        for n in range(1, 18):
            want = min(sum(labels[:n]), n - sum(labels[:n]))
            assert rep.best_loss[n - 1] == want

    def test_pool_growth_never_increases_best_loss(self):
        adv = adversaries.noisy_target_stream(singleton_hypothesis(3), 0.2, seed=3)
        t = engine.run_game(learners.constant_learner(0), adv, 50)
        small = [singleton_hypothesis(k) for k in range(3)]
        big = small + [singleton_hypothesis(k) for k in range(3, 9)]
        rep_small = engine.regret_report(t, small)
        rep_big = engine.regret_report(t, big)
        assert (rep_big.best_loss <= rep_small.best_loss).all()

    def test_class_pool_budget_is_recorded(self):
        t = engine.run_game(learners.constant_learner(0),
                            adversaries.alternating_stream(0), 10)
        rep = engine.regret_report(t, classes.singletons(), budget=5)
        assert rep.pool_size == 5 and rep.pool_truncated

    def test_csv_shape(self):
        t = engine.run_game(learners.constant_learner(0),
                            adversaries.alternating_stream(0), 4)
        rep = engine.regret_report(t, [singleton_hypothesis(0)])
        lines = rep.to_csv().strip().split("\n")
        assert lines[0] == "n,learner_loss,best_loss,regret,regret_over_n,se"
        assert len(lines) == 5


class TestEstimateExpected:
    def test_deterministic_learner_zero_variance(self):
        adv = adversaries.fixed_target(singleton_hypothesis(2))
        rep, _ = engine.estimate_expected(learners.constant_learner(0), adv,
                                          rounds=20, trials=8, seed=4)
        assert np.allclose(rep.se_mistakes, 0.0)

    def test_coin_flip_concentrates_at_half(self):
        adv = adversaries.fixed_target(
            core.Hypothesis(EventuallyConstant("", 0)))
        rep, _ = engine.estimate_expected(learners.coin_flip_learner(), adv,
                                          rounds=100, trials=400, seed=11)
        rate = rep.mean_mistakes[-1] / 100
        se = rep.se_mistakes[-1] / 100
        assert abs(rate - 0.5) <= 3 * se + 1e-12

    def test_distinct_seeds_agree_within_bands(self):
        adv = adversaries.fixed_target(
            core.Hypothesis(EventuallyConstant("", 0)))
        r1, _ = engine.estimate_expected(learners.coin_flip_learner(), adv,
                                         rounds=60, trials=400, seed=1)
        r2, _ = engine.estimate_expected(learners.coin_flip_learner(), adv,
                                         rounds=60, trials=400, seed=2)
        diff = abs(r1.mean_mistakes[-1] - r2.mean_mistakes[-1])
        band = 3 * (r1.se_mistakes[-1] + r2.se_mistakes[-1])
        assert diff <= band

    def test_trials_precondition(self):
        with pytest.raises(ValueError):
            engine.estimate_expected(learners.coin_flip_learner(),
                                     adversaries.alternating_stream(0),
                                     rounds=5, trials=1)

    def test_trial_columns_differ(self):
        adv = adversaries.fixed_target(
            core.Hypothesis(EventuallyConstant("", 0)))
        _, ts = engine.estimate_expected(learners.coin_flip_learner(), adv,
                                         rounds=40, trials=6, seed=9)
        preds = {tuple(r.prediction for r in t.rounds) for t in ts}
        assert len(preds) > 1  # independent advice per trial


class TestBlockRegretTable:
    def test_rows_cover_complete_blocks_only(self):
        pool = [singleton_hypothesis(k) for k in range(4)]
        L = learners.ewa_doubling(pool)
        adv = adversaries.fixed_target(singleton_hypothesis(0))
        ts = [engine.run_game(L, adv, 30, seed=s) for s in (1, 2)]
        rows = engine.block_regret_table(ts, pool)
        assert [r.k for r in rows] == [1, 2, 3, 4]  # 2+4+8+16 = 30 rounds
        assert rows[1].active_experts == 2
        assert rows[3].active_experts == 4  # pool caps the active count
