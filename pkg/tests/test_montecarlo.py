import math

import numpy as np
import pytest
from scipy import stats

from qillum.discrimination import TrialOutcomeModel, conditional_probs
from qillum.errors import DegenerateModelError, DomainError
from qillum.montecarlo import (
    Decision,
    Strategy,
    TrialConfig,
    TrialResult,
    campaign,
    first_photon_horizon,
    run_first_photon,
    run_replicas,
    run_sprt,
    summarize,
)
from qillum.scenarios import Kind, ScenarioParams


def model(eta, b, d=1, kind=Kind.UNENTANGLED):
    return conditional_probs(ScenarioParams(eta, b, d), kind)


def test_sprt_deterministic_increments():
    cfg = TrialConfig(seed=9, alpha=0.01, beta=0.01)
    res = run_sprt(TrialOutcomeModel(0.5, 1.0), Decision.PRESENT, cfg)
    expected = math.ceil(math.log(0.99 / 0.01) / math.log(2))
    assert res == TrialResult(Decision.PRESENT, expected, expected)


def test_sprt_impossible_outcome_decides_absent():
    # p_yes|present = 1: a single 'no' rules the target out
    res = run_sprt(TrialOutcomeModel(0.5, 1.0), Decision.ABSENT, TrialConfig(seed=2))
    assert res.decision is Decision.ABSENT
    assert res.yes_count == res.shots_used - 1


@pytest.mark.parametrize("p0", [0.0, 1.0])
def test_sprt_rejects_degenerate_model(p0):
    with pytest.raises(DegenerateModelError, match="run_first_photon"):
        run_sprt(TrialOutcomeModel(p0, 0.5), Decision.PRESENT, TrialConfig(seed=1))


def test_sprt_undecided_at_shot_limit():
    res = run_sprt(model(0.01, 0.1), Decision.PRESENT, TrialConfig(seed=4, max_shots=50))
    assert res.decision is Decision.UNDECIDED
    assert res.shots_used == 50 and res.yes_count <= 50


def test_sprt_result_invariants():
    cfg = TrialConfig(seed=11, max_shots=5000)
    for r in range(50):
        res = run_sprt(model(0.05, 0.05), Decision.PRESENT, cfg, r)
        assert 1 <= res.shots_used <= cfg.max_shots
        assert 0 <= res.yes_count <= res.shots_used


def test_sprt_mean_shots_against_wald_approximation():
    # Wald's approximation to the expected sample number under H1
    m = model(0.05, 0.05)
    cfg = TrialConfig(seed=5, replicas=2000)
    a, b = cfg.upper_threshold, cfg.lower_threshold
    p0, p1 = m.p_yes_given_absent, m.p_yes_given_present
    kl = p1 * math.log(p1 / p0) + (1 - p1) * math.log((1 - p1) / (1 - p0))
    wald = ((1 - cfg.beta) * a + cfg.beta * b) / kl
    summary = campaign(m, Decision.PRESENT, cfg)
    # overshoot makes the true mean somewhat larger than Wald's value
    assert wald <= summary.mean_shots <= 1.3 * wald


def test_first_photon_noiseless_absent_uses_horizon():
    m = model(0.1, 0.0)
    cfg = TrialConfig(seed=3, max_shots=500)
    assert first_photon_horizon(m, cfg.max_shots) == 500
    for r in range(20):
        assert run_first_photon(m, Decision.ABSENT, cfg, r) == TrialResult(Decision.ABSENT, 500, 0)


def test_first_photon_mean_goes_as_inverse_reflectivity():
    summary = campaign(model(0.1, 0.0), Decision.PRESENT, TrialConfig(seed=8, replicas=1000),
                       Strategy.FIRST_PHOTON)
    assert 5 <= summary.mean_shots <= 20
    assert summary.error_rate == 0.0


def test_first_photon_entangled_good_regime():
    m = model(0.01, 0.1, 100, Kind.ENTANGLED)
    p1, p0 = m.p_yes_given_present, m.p_yes_given_absent
    assert 1 / p1 == pytest.approx(91, abs=0.5)
    assert 1 / p0 == pytest.approx(1000)
    h = first_photon_horizon(m, 10**7)
    assert h == math.ceil(math.sqrt(1 / (p1 * p0)))
    cfg = TrialConfig(seed=21, replicas=4000)
    present = run_replicas(m, Decision.PRESENT, cfg, Strategy.FIRST_PHOTON)
    mean = np.mean([r.shots_used for r in present])
    truncated_mean = (1 - (1 - p1) ** h) / p1
    sd = math.sqrt((1 - p1) / p1 ** 2 / cfg.replicas)
    assert abs(mean - truncated_mean) <= 4 * sd
    absent = run_replicas(m, Decision.ABSENT, cfg, Strategy.FIRST_PHOTON)
    false_alarms = sum(r.decision is Decision.PRESENT for r in absent)
    pfa = 1 - (1 - p0) ** h
    assert abs(false_alarms / cfg.replicas - pfa) <= 4 * math.sqrt(pfa * (1 - pfa) / cfg.replicas)
    # a noise click is far later on average than a signal click
    noise_clicks = [r.shots_used for r in absent if r.decision is Decision.PRESENT]
    assert np.mean(noise_clicks) > mean


def test_first_photon_geometric_distribution():
    m = TrialOutcomeModel(0.0, 0.2)
    cfg = TrialConfig(seed=77, max_shots=10**6)
    shots = np.array([run_first_photon(m, Decision.PRESENT, cfg, r).shots_used for r in range(3000)])
    counts = np.bincount(shots, minlength=30)[1:30]
    expected = 3000 * stats.geom.pmf(np.arange(1, 30), 0.2)
    keep = expected >= 5
    chi2 = (((counts - expected) ** 2 / expected)[keep]).sum()
    assert stats.chi2.sf(chi2, keep.sum() - 1) > 1e-3


def test_campaign_deterministic_and_parallel_invariant():
    m = model(0.02, 0.05, 4, Kind.ENTANGLED)
    cfg = TrialConfig(seed=2024, replicas=400)
    serial = run_replicas(m, Decision.PRESENT, cfg)
    assert serial == run_replicas(m, Decision.PRESENT, cfg)
    assert serial == run_replicas(m, Decision.PRESENT, cfg, workers=4)
    assert campaign(m, Decision.PRESENT, cfg) == campaign(m, Decision.PRESENT, cfg, workers=3)
    other = run_replicas(m, Decision.PRESENT, TrialConfig(seed=2025, replicas=400))
    assert other != serial


def test_campaign_good_regime_error_rate():
    summary = campaign(model(0.1, 0.001), Decision.PRESENT, TrialConfig(seed=1, replicas=1000))
    assert summary.error_rate <= 0.02


@pytest.mark.parametrize("truth", [Decision.PRESENT, Decision.ABSENT])
def test_sprt_error_calibration(truth):
    cfg = TrialConfig(seed=606, alpha=0.01, beta=0.01, replicas=3000)
    summary = campaign(model(0.01, 0.1, 8, Kind.ENTANGLED), truth, cfg)
    assert summary.error_rate <= 3 * 0.01


def test_campaign_requires_replicas():
    with pytest.raises(DomainError):
        campaign(model(0.1, 0.01), Decision.PRESENT, TrialConfig(seed=1, replicas=10))


def test_summary_all_undecided_is_nan():
    results = [TrialResult(Decision.UNDECIDED, 10, 1)] * 40
    s = summarize(results, Decision.PRESENT)
    assert math.isnan(s.error_rate)
    assert s.mean_shots == 10 and s.ci95_halfwidth == 0


def test_summary_ci():
    results = [TrialResult(Decision.PRESENT, n, 1) for n in (1, 2, 3, 4)] * 10
    s = summarize(results, Decision.ABSENT)
    sd = np.std([r.shots_used for r in results], ddof=1)
    assert s.ci95_halfwidth == pytest.approx(1.96 * sd / math.sqrt(40), rel=1e-3)
    assert s.error_rate == 1.0


def test_config_validation():
    with pytest.raises(DomainError):
        TrialConfig(seed=-1)
    with pytest.raises(DomainError):
        TrialConfig(seed=1, alpha=0.5)
    with pytest.raises(DomainError):
        TrialConfig(seed=1, max_shots=0)
