"""Monte Carlo photon counting under the per-shot yes/no outcome models.

Each replica draws from its own counter-based Philox stream keyed by
``(seed, replica)``, so campaign output does not depend on how replicas are
scheduled across workers.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .discrimination import TrialOutcomeModel
from .errors import DegenerateModelError, DomainError

log = logging.getLogger(__name__)

MIN_CAMPAIGN_REPLICAS = 30
_FIRST_BLOCK = 1024
_MAX_BLOCK = 1 << 16


class Decision(str, enum.Enum):
    PRESENT = "present"
    ABSENT = "absent"
    UNDECIDED = "undecided"


class Strategy(str, enum.Enum):
    SPRT = "sprt"
    FIRST_PHOTON = "first-photon"


@dataclass(frozen=True)
class TrialConfig:
    seed: int
    alpha: float = 0.01
    beta: float = 0.01
    max_shots: int = 10_000_000
    replicas: int = 1000

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 0.5:
                raise DomainError(f"{name} must lie in (0, 0.5), got {v}")
        if self.max_shots < 1:
            raise DomainError(f"max_shots must be >= 1, got {self.max_shots}")
        if self.replicas < 1:
            raise DomainError(f"replicas must be >= 1, got {self.replicas}")

    @property
    def upper_threshold(self) -> float:
        return math.log((1.0 - self.beta) / self.alpha)

    @property
    def lower_threshold(self) -> float:
        return math.log(self.beta / (1.0 - self.alpha))


@dataclass(frozen=True)
class TrialResult:
    decision: Decision
    shots_used: int
    yes_count: int


@dataclass(frozen=True)
class CampaignSummary:
    mean_shots: float
    ci95_halfwidth: float
    error_rate: float
    replicas: int


def replica_rng(seed: int, replica: int, *extra: int) -> np.random.Generator:
    """Independent Philox stream for ``(seed, replica, *extra)``."""
    ss = np.random.SeedSequence(seed, spawn_key=(replica,) + tuple(extra))
    return np.random.Generator(np.random.Philox(ss))


def _p_yes(model: TrialOutcomeModel, truth: Decision) -> float:
    truth = Decision(truth)
    if truth is Decision.PRESENT:
        return model.p_yes_given_present
    if truth is Decision.ABSENT:
        return model.p_yes_given_absent
    raise DomainError("truth must be 'present' or 'absent'")


def _llr_increments(model: TrialOutcomeModel):
    p0, p1 = model.p_yes_given_absent, model.p_yes_given_present
    with np.errstate(divide="ignore"):
        yes = float(np.log(p1) - np.log(p0))
        no = float(np.log1p(-p1) - np.log1p(-p0))
    return yes, no


def run_sprt(model: TrialOutcomeModel, truth: Decision, config: TrialConfig,
             replica: int = 0) -> TrialResult:
    """Wald sequential probability ratio test on simulated shots.

    Shots are drawn under ``truth``; the log-likelihood ratio of present
    versus absent is accumulated until it leaves
    ``(ln(beta/(1-alpha)), ln((1-beta)/alpha))``. A present-hypothesis
    probability of 0 or 1 is allowed and gives infinite increments.

    Raises
    ------
    DegenerateModelError
        If the absent-hypothesis yes probability is 0 or 1; use
        :func:`run_first_photon` instead.
    """
    p0 = model.p_yes_given_absent
    if p0 <= 0.0 or p0 >= 1.0:
        raise DegenerateModelError(
            f"p_yes_given_absent = {p0}: likelihood ratio undefined, use run_first_photon"
        )
    p = _p_yes(model, truth)
    inc_yes, inc_no = _llr_increments(model)
    upper, lower = config.upper_threshold, config.lower_threshold
    rng = replica_rng(config.seed, replica)

    llr = 0.0
    shots = 0
    yes_total = 0
    block = _FIRST_BLOCK
    while shots < config.max_shots:
        n = min(block, config.max_shots - shots)
        hits = rng.random(n) < p
        path = llr + np.cumsum(np.where(hits, inc_yes, inc_no))
        crossed = np.flatnonzero((path >= upper) | (path <= lower))
        if crossed.size:
            i = int(crossed[0])
            yes_total += int(np.count_nonzero(hits[: i + 1]))
            decision = Decision.PRESENT if path[i] >= upper else Decision.ABSENT
            return TrialResult(decision, shots + i + 1, yes_total)
        llr = float(path[-1])
        shots += n
        yes_total += int(np.count_nonzero(hits))
        block = min(2 * block, _MAX_BLOCK)
    return TrialResult(Decision.UNDECIDED, shots, yes_total)


def first_photon_horizon(model: TrialOutcomeModel, max_shots: int) -> int:
    """``ceil(sqrt(1/(p_yes|present * p_yes|absent)))`` capped at ``max_shots``."""
    prod = model.p_yes_given_present * model.p_yes_given_absent
    if prod <= 0.0:
        return max_shots
    return int(min(math.ceil(math.sqrt(1.0 / prod)), max_shots))


def run_first_photon(model: TrialOutcomeModel, truth: Decision, config: TrialConfig,
                     replica: int = 0) -> TrialResult:
    """Send photons until one is received back or the horizon is reached.

    A click at or before the horizon means 'present', otherwise 'absent'.
    """
    p = _p_yes(model, truth)
    horizon = first_photon_horizon(model, config.max_shots)
    rng = replica_rng(config.seed, replica)
    first = int(rng.geometric(p)) if p > 0.0 else horizon + 1
    if first <= horizon:
        return TrialResult(Decision.PRESENT, first, 1)
    return TrialResult(Decision.ABSENT, horizon, 0)


_RUNNERS = {Strategy.SPRT: run_sprt, Strategy.FIRST_PHOTON: run_first_photon}


def run_replicas(model: TrialOutcomeModel, truth: Decision, config: TrialConfig,
                 strategy: Strategy = Strategy.SPRT,
                 workers: Optional[int] = None) -> List[TrialResult]:
    """All replica results, in replica-index order."""
    runner = _RUNNERS[Strategy(strategy)]
    truth = Decision(truth)
    indices = range(config.replicas)
    if workers is None or workers <= 1:
        return [runner(model, truth, config, r) for r in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: runner(model, truth, config, r), indices))


def summarize(results: List[TrialResult], truth: Decision) -> CampaignSummary:
    truth = Decision(truth)
    shots = np.array([r.shots_used for r in results], dtype=float)
    n = shots.size
    mean = float(np.sum(shots) / n)
    sd = float(np.std(shots, ddof=1)) if n > 1 else 0.0
    ci = 1.959963984540054 * sd / math.sqrt(n)
    decided = [r for r in results if r.decision is not Decision.UNDECIDED]
    if not decided:
        log.warning("all %d replicas undecided; error rate undefined", n)
        error_rate = math.nan
    else:
        wrong = sum(1 for r in decided if r.decision is not truth)
        error_rate = wrong / len(decided)
    return CampaignSummary(mean, ci, error_rate, n)


def campaign(model: TrialOutcomeModel, truth: Decision, config: TrialConfig,
             strategy: Strategy = Strategy.SPRT,
             workers: Optional[int] = None) -> CampaignSummary:
    """Mean shots to decision, its 95% normal-approximation half-width, and
    the decision error rate among decided replicas."""
    if config.replicas < MIN_CAMPAIGN_REPLICAS:
        raise DomainError(
            f"campaign needs replicas >= {MIN_CAMPAIGN_REPLICAS}, got {config.replicas}"
        )
    results = run_replicas(model, truth, config, strategy, workers)
    return summarize(results, truth)
