"""Game execution, mistake/regret accounting, and Monte Carlo estimation.

The protocol per round: the adversary names a point, the learner predicts
from the transcript so far, the adversary reveals the label. Transcripts
are deterministic functions of (learner, adversary, rounds, fuel, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import progmodel
from .core import (
    Hypothesis,
    HypothesisClass,
    Sample,
    SearchExhausted,
    evaluate,
    evaluate_many,
)
from .classes import UndefinedAt
from .learners import AdviceStream, Learner, MassUnreachable, block_of_round
from .adversaries import Adversary
from .progmodel import FuelExhausted


@dataclass(frozen=True)
class Round:
    t: int
    x: int
    prediction: int
    y: int
    mistake: int
    cum_mistakes: int
    audit: str  # 'yes' | 'no' | 'unknown' | '-'


@dataclass
class Transcript:
    learner: str
    adversary: str
    seed: Optional[int]
    rounds: list = field(default_factory=list)
    aborted: bool = False
    abort_reason: str = ""
    fuel_spent: int = 0

    def mistakes(self) -> int:
        return self.rounds[-1].cum_mistakes if self.rounds else 0

    def mistake_flags(self) -> list:
        return [r.mistake for r in self.rounds]

    def mistake_rate(self, t: int) -> float:
        """Cumulative mistakes divided by rounds, after round t (1-based count)."""
        return self.rounds[t].cum_mistakes / (t + 1)

    def word(self) -> str:
        return "".join(str(r.y) for r in self.rounds)

    def to_lines(self) -> list:
        return [
            f"{r.t}\t{r.x}\t{r.prediction}\t{r.y}\t{r.mistake}\t{r.cum_mistakes}\t{r.audit}"
            for r in self.rounds
        ]

    def sample(self) -> Sample:
        return Sample((r.x, r.y) for r in self.rounds)


def run_game(learner: Learner, adversary: Adversary, rounds: int,
             fuel: Optional[int] = None, seed: int = 0,
             advice=None, audit: str = "auto") -> Transcript:
    """Play the game for finitely many rounds.

    ``audit`` records per-round realizability of the revealed prefix:
    'auto' audits when the adversary declares an audit class, 'off'
    disables it. A learner error (fuel, search, or mass exhaustion)
    aborts the game; the partial transcript is flagged.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    adversary = adversary.fresh()
    if advice is None and learner.randomized:
        advice = AdviceStream(seed)
    monitor = None
    if audit == "each" or (audit == "auto" and adversary.audit_class is not None):
        cls = adversary.audit_class
        monitor = cls.monitor() if cls is not None else None
    transcript = Transcript(learner.name, adversary.name, seed)
    sample = Sample()
    cum = 0
    with progmodel.fuel_meter() as meter:
        for t in range(rounds):
            x = adversary.next_point(transcript)
            try:
                prediction = learner.predict(sample, x, advice=advice)
            except (FuelExhausted, SearchExhausted, UndefinedAt, MassUnreachable) as exc:
                transcript.aborted = True
                transcript.abort_reason = f"{type(exc).__name__}: {exc}"
                break
            if fuel is not None and meter[0] > fuel:
                transcript.aborted = True
                transcript.abort_reason = f"global fuel cap {fuel} exceeded"
                break
            y = adversary.reveal(transcript, prediction)
            verdict = "-"
            if monitor is not None:
                verdict = monitor.query(x, y).verdict
                monitor.push(x, y)
            mistake = int(prediction != y)
            cum += mistake
            transcript.rounds.append(Round(t, x, prediction, y, mistake, cum, verdict))
            sample = sample.append(x, y)
        transcript.fuel_spent = meter[0]
    return transcript


@dataclass
class RegretReport:
    """Per-round learner loss against the best loss in a hypothesis pool."""

    learner_loss: np.ndarray
    best_loss: np.ndarray
    pool_size: int
    pool_truncated: bool

    @property
    def regret(self) -> np.ndarray:
        return self.learner_loss - self.best_loss

    @property
    def regret_over_n(self) -> np.ndarray:
        n = np.arange(1, len(self.learner_loss) + 1)
        return self.regret / n

    def to_csv(self) -> str:
        lines = ["n,learner_loss,best_loss,regret,regret_over_n,se"]
        reg = self.regret
        ron = self.regret_over_n
        for i in range(len(self.learner_loss)):
            lines.append(
                f"{i + 1},{int(self.learner_loss[i])},{int(self.best_loss[i])},"
                f"{int(reg[i])},{ron[i]:.6f},0.000000"
            )
        return "\n".join(lines) + "\n"


def _pool_hypotheses(pool, budget: Optional[int]) -> tuple[list, bool]:
    if isinstance(pool, HypothesisClass):
        out = []
        limit = budget if budget is not None else 256
        truncated = True
        for h in pool.enumerate():
            if len(out) >= limit:
                break
            out.append(h)
        else:
            truncated = False
        return out, truncated
    return list(pool), False


def regret_report(transcript: Transcript, pool, budget: Optional[int] = None) -> RegretReport:
    """Brute-force the best-in-pool loss at every prefix length.

    Exact for explicit pools and explicit-finite classes; for enumerated
    classes the pool is the first ``budget`` members and the report says
    so (the budget limitation is recorded, not hidden).
    """
    hyps, truncated = _pool_hypotheses(pool, budget)
    n = len(transcript.rounds)
    learner_loss = np.cumsum([r.mistake for r in transcript.rounds]).astype(np.int64)
    if hyps and n:
        xs = np.array([r.x for r in transcript.rounds], dtype=np.int64)
        ys = np.array([r.y for r in transcript.rounds], dtype=np.int64)
        cum = np.stack([np.cumsum(evaluate_many(h, xs) != ys) for h in hyps])
        best_loss = cum.min(axis=0).astype(np.int64)
    else:
        best_loss = np.zeros(n, dtype=np.int64)
    return RegretReport(learner_loss, best_loss, len(hyps), truncated)


@dataclass
class ExpectationReport:
    """Monte Carlo means with standard-error bands, per round."""

    trials: int
    mean_mistakes: np.ndarray
    se_mistakes: np.ndarray
    mean_regret: Optional[np.ndarray] = None
    se_regret: Optional[np.ndarray] = None

    def to_csv(self) -> str:
        lines = ["n,mean_mistakes,se_mistakes,mean_regret,se_regret"]
        for i in range(len(self.mean_mistakes)):
            mr = f"{self.mean_regret[i]:.6f}" if self.mean_regret is not None else ""
            sr = f"{self.se_regret[i]:.6f}" if self.se_regret is not None else ""
            lines.append(
                f"{i + 1},{self.mean_mistakes[i]:.6f},{self.se_mistakes[i]:.6f},{mr},{sr}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BlockRow:
    k: int
    start: int
    length: int
    active_experts: int
    mean_regret: float
    se_regret: float


def block_regret_table(transcripts: Sequence[Transcript], experts: Sequence[Hypothesis]) -> list:
    """Per-block regret of the doubling schedule against the best active expert.

    Block k spans rounds [2^k - 2, 2^k - 2 + 2^k) and activates the first
    min(k, len(experts)) experts; a block counts only when the transcripts
    cover it completely.
    """
    rounds = min(len(t.rounds) for t in transcripts)
    rows = []
    k = 1
    while True:
        _, start, length = block_of_round((1 << k) - 2)
        if start + length > rounds:
            break
        nact = min(k, len(experts))
        regrets = []
        for tr in transcripts:
            seg = tr.rounds[start:start + length]
            xs = np.array([r.x for r in seg], dtype=np.int64)
            ys = np.array([r.y for r in seg], dtype=np.int64)
            learner_loss = sum(r.mistake for r in seg)
            best = min(int((evaluate_many(h, xs) != ys).sum()) for h in experts[:nact])
            regrets.append(learner_loss - best)
        arr = np.array(regrets, dtype=np.float64)
        se = arr.std(ddof=1) / math.sqrt(len(arr)) if len(arr) > 1 else 0.0
        rows.append(BlockRow(k, start, length, nact, float(arr.mean()), float(se)))
        k += 1
    return rows


def estimate_expected(learner: Learner, adversary: Adversary, rounds: int,
                      trials: int, seed: int = 0, pool=None,
                      budget: Optional[int] = None) -> tuple:
    """Run independent games and average the mistake (and regret) series.

    Trial i reads advice from column i of the master seed's stream, so
    trials are mutually independent and the whole estimate is a pure
    function of the seed. Returns (ExpectationReport, transcripts).
    """
    if trials < 2:
        raise ValueError("need at least 2 trials for standard errors")
    master = AdviceStream(seed)
    cum_mistakes = np.zeros((trials, rounds), dtype=np.float64)
    cum_regret = np.zeros((trials, rounds), dtype=np.float64) if pool is not None else None
    transcripts = []
    for i in range(trials):
        tr = run_game(learner, adversary, rounds, seed=seed, advice=master.column(i))
        if tr.aborted:
            raise RuntimeError(f"trial {i} aborted: {tr.abort_reason}")
        flags = np.array(tr.mistake_flags(), dtype=np.float64)
        cum_mistakes[i] = np.cumsum(flags)
        if cum_regret is not None:
            rep = regret_report(tr, pool, budget)
            cum_regret[i] = rep.regret.astype(np.float64)
        transcripts.append(tr)
    mean_m = cum_mistakes.mean(axis=0)
    se_m = cum_mistakes.std(axis=0, ddof=1) / math.sqrt(trials)
    if cum_regret is not None:
        mean_r = cum_regret.mean(axis=0)
        se_r = cum_regret.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        mean_r = se_r = None
    return ExpectationReport(trials, mean_m, se_m, mean_r, se_r), transcripts
