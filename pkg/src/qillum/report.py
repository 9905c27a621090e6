"""Row builders for the tabular outputs (evaluations, sweeps, campaigns)."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Dict, List, Optional, Sequence

from .discrimination import (
    analytic_q_entangled,
    analytic_q_unentangled,
    chernoff_numeric,
    conditional_probs,
    helstrom,
    q_regime_approx,
    regime,
    trials_needed,
)
from .errors import CapacityError, UnboundedTrialsError
from .hilbert import check_dim
from .montecarlo import Decision, Strategy, TrialConfig, campaign
from .scenarios import DB_LIMIT, Kind, ScenarioParams, SignalSpec, build_pair

log = logging.getLogger(__name__)


def _analytic(params: ScenarioParams, kind: Kind):
    if kind is Kind.ENTANGLED:
        return analytic_q_entangled(params.eta, params.b, params.d)
    return analytic_q_unentangled(params.eta, params.b)


def states_constructible(params: ScenarioParams, kind: Kind) -> bool:
    if params.db >= DB_LIMIT:
        return False
    if kind is Kind.ENTANGLED:
        try:
            check_dim(params.d * (params.d + 1))
        except CapacityError:
            return False
    return True


def chernoff_row(params: ScenarioParams, kind: Kind, psi: Optional[SignalSpec] = None) -> Dict:
    kind = Kind(kind)
    num = chernoff_numeric(build_pair(params, kind, psi))
    ana = _analytic(params, kind)
    return {
        "kind": kind.value, "eta": params.eta, "b": params.b, "d": params.d,
        "q_numeric": num.q, "s_star": num.s_star, "exponent": num.exponent,
        "q_analytic": ana.q, "s_star_analytic": ana.s_star,
    }


CHERNOFF_COLUMNS = ("kind", "eta", "b", "d", "q_numeric", "s_star", "exponent",
                    "q_analytic", "s_star_analytic")


def helstrom_row(params: ScenarioParams, kind: Kind, psi: Optional[SignalSpec] = None) -> Dict:
    kind = Kind(kind)
    res = helstrom(build_pair(params, kind, psi), params.prior0, params.prior1)
    rank = int(round(res.measurement.trace()))
    return {
        "kind": kind.value, "eta": params.eta, "b": params.b, "d": params.d,
        "prior0": params.prior0, "p_error": res.p_error, "measurement_rank": rank,
    }


HELSTROM_COLUMNS = ("kind", "eta", "b", "d", "prior0", "p_error", "measurement_rank")


def probs_row(params: ScenarioParams, kind: Kind) -> Dict:
    m = conditional_probs(params, kind)
    return {
        "kind": Kind(kind).value, "eta": params.eta, "b": params.b, "d": params.d,
        "p_yes_given_absent": m.p_yes_given_absent,
        "p_yes_given_present": m.p_yes_given_present,
        "p_no_given_absent": m.p_no_given_absent,
        "p_no_given_present": m.p_no_given_present,
    }


PROBS_COLUMNS = ("kind", "eta", "b", "d", "p_yes_given_absent", "p_yes_given_present",
                 "p_no_given_absent", "p_no_given_present")


def sweep_row(eta: float, b: float, d: int, kind: Kind,
              psi: Optional[SignalSpec] = None) -> Dict:
    """One row of the discrimination sweep.

    Cells where the hypothesis states cannot be built (``d*b >= 0.5`` or
    joint dimension over the cap) still report the closed-form columns; the
    matrix-derived columns are NaN.
    """
    kind = Kind(kind)
    params = ScenarioParams(eta=eta, b=b, d=d)
    label = regime(eta, b, d, kind)
    row = {
        "eta": eta, "b": b, "d": d, "kind": kind.value, "regime": label.value.value,
        "q_numeric": math.nan, "s_star": math.nan,
        "q_analytic": _analytic(params, kind).q,
        "q_regime_approx": q_regime_approx(eta, b, d, kind),
        "helstrom_error": math.nan, "trials_eps01": math.nan,
    }
    if not states_constructible(params, kind):
        log.warning("eta=%g b=%g d=%d %s: states not constructible, numeric columns are nan",
                    eta, b, d, kind.value)
        return row
    pair = build_pair(params, kind, psi if kind is Kind.UNENTANGLED else None)
    num = chernoff_numeric(pair)
    row["q_numeric"] = num.q
    row["s_star"] = num.s_star
    row["helstrom_error"] = helstrom(pair).p_error
    try:
        row["trials_eps01"] = trials_needed(num.q, 0.01)
    except UnboundedTrialsError:
        row["trials_eps01"] = math.inf
    return row


def sweep(etas: Sequence[float], bs: Sequence[float], ds: Sequence[int],
          kinds: Sequence[Kind], workers: Optional[int] = None) -> List[Dict]:
    """Cartesian grid in input order (eta outermost, kind innermost)."""
    cells = list(product(etas, bs, ds, [Kind(k) for k in kinds]))
    if workers is None or workers <= 1:
        return [sweep_row(*c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: sweep_row(*c), cells))


def campaign_row(params: ScenarioParams, kind: Kind, truth: Decision, config: TrialConfig,
                 strategy: Strategy = Strategy.SPRT, workers: Optional[int] = None) -> Dict:
    kind, truth = Kind(kind), Decision(truth)
    model = conditional_probs(params, kind)
    summary = campaign(model, truth, config, strategy, workers)
    return {
        "kind": kind.value, "truth": truth.value, "eta": params.eta, "b": params.b,
        "d": params.d, "alpha": config.alpha, "beta": config.beta,
        "replicas": summary.replicas, "mean_shots": summary.mean_shots,
        "ci95": summary.ci95_halfwidth, "error_rate": summary.error_rate,
        "seed": config.seed,
    }
