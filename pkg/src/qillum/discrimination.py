"""Distinguishing target-absent from target-present returns.

Single-shot optimum (Helstrom) error, the quantum Chernoff bound
``Q = min_s tr rho0^(1-s) rho1^s`` both from full matrices and from the
lowest-order closed form, the per-shot yes/no outcome model of the optimal
measurement, and conversion of ``Q`` to a number of trials.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError, StructuralError, UnboundedTrialsError
from .hilbert import (
    DensityMatrix,
    HermitianOperator,
    _clipped_eigenvalues,
    dm_power,
    eig_hermitian,
    identity,
    positive_part_projector,
    spectral_power,
)
from .scenarios import HypothesisPair, Kind, ScenarioParams

GRID_POINTS = 65
S_TOL = 1e-8
IMAG_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class HelstromResult:
    p_error: float
    measurement: HermitianOperator


@dataclass(frozen=True)
class ChernoffResult:
    """Minimised Chernoff quantity ``q`` at ``s_star``; ``exponent = -ln q``."""

    q: float
    s_star: float
    exponent: float

    @classmethod
    def from_minimum(cls, q: float, s_star: float) -> "ChernoffResult":
        q = min(float(q), 1.0)
        exponent = math.inf if q <= 0.0 else max(-math.log(q), 0.0)
        return cls(q, float(s_star), exponent)

    def trials(self, epsilon: float = 0.01) -> int:
        return trials_needed(self.q, epsilon)


@dataclass(frozen=True)
class TrialOutcomeModel:
    """Per-shot probability of a 'yes' click under each hypothesis."""

    p_yes_given_absent: float
    p_yes_given_present: float
    kind: Kind = Kind.UNENTANGLED

    def __post_init__(self):
        for name in ("p_yes_given_absent", "p_yes_given_present"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {p}")
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def p_no_given_absent(self) -> float:
        return 1.0 - self.p_yes_given_absent

    @property
    def p_no_given_present(self) -> float:
        return 1.0 - self.p_yes_given_present


class Regime(str, enum.Enum):
    GOOD = "good"
    BAD = "bad"


@dataclass(frozen=True)
class RegimeLabel:
    value: Regime
    ratio: float


def helstrom(pair: HypothesisPair, prior0: float = 0.5,
             prior1: Optional[float] = None) -> HelstromResult:
    """Minimum single-shot error of guessing which state was received.

    The optimal 'yes' (target present) measurement projects onto the
    positive part of ``prior1*rho1 - prior0*rho0``; exactly-zero eigenvalues
    are assigned to 'no'.
    """
    if prior1 is None:
        prior1 = 1.0 - prior0
    if abs(prior0 + prior1 - 1.0) > 1e-12 or min(prior0, prior1) < 0:
        raise DomainError(f"priors must be non-negative and sum to 1, got {prior0}, {prior1}")
    rho0, rho1 = pair.rho0, pair.rho1
    if not rho0.same_space(rho1):
        raise StructuralError("hypothesis states must share a basis")
    p = positive_part_projector(rho1.scaled(prior1) - rho0.scaled(prior0))
    not_p = identity(rho0.basis) - p
    err = prior0 * _trace_product(p, rho0) + prior1 * _trace_product(not_p, rho1)
    return HelstromResult(err, p)


def _trace_product(a: HermitianOperator, b: HermitianOperator) -> float:
    return float(np.real(np.sum(a.matrix * b.matrix.T)))


def q_of_s(rho0: DensityMatrix, rho1: DensityMatrix, s: float) -> float:
    """``tr rho0^(1-s) rho1^s`` (support projectors at the endpoints)."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"s must lie in [0, 1], got {s}")
    if not rho0.same_space(rho1):
        raise StructuralError("hypothesis states must share a basis")
    a = dm_power(rho0, 1.0 - s).matrix
    b = dm_power(rho1, s).matrix
    val = np.sum(a * b.T)
    if abs(val.imag) > IMAG_TOL:
        raise ArithmeticError(f"trace has imaginary residue {val.imag:.3e}")
    return float(val.real)


def minimize_unit_interval(f: Callable[[float], float]) -> Tuple[float, float]:
    """Minimise ``f`` on [0, 1]: 65-point grid, then golden section on the
    bracket around the best grid point until it is narrower than 1e-8.

    Returns ``(f_min, s_min)``.
    """
    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    vals = [f(float(s)) for s in grid]
    i = int(np.argmin(vals))
    best_f, best_s = vals[i], float(grid[i])
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, GRID_POINTS - 1)])
    c = b - _INV_PHI * (b - a)
    e = a + _INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    while b - a > S_TOL:
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INV_PHI * (b - a)
            fe = f(e)
    s = 0.5 * (a + b)
    fs = f(s)
    if fs < best_f:
        best_f, best_s = fs, s
    return best_f, best_s


def chernoff_curve(rho0: DensityMatrix, rho1: DensityMatrix) -> Callable[[float], float]:
    """``s -> tr rho0^(1-s) rho1^s`` reusing one eigendecomposition per state.

    With ``rho0 = sum lam_i |v_i><v_i|`` and ``rho1 = sum mu_j |w_j><w_j|`` the
    trace is ``sum_ij lam_i^(1-s) mu_j^s |<v_i|w_j>|^2``.
    """
    if not rho0.same_space(rho1):
        raise StructuralError("hypothesis states must share a basis")
    s0, s1 = eig_hermitian(rho0), eig_hermitian(rho1)
    lam = _clipped_eigenvalues(s0)
    mu = _clipped_eigenvalues(s1)
    overlap = np.abs(s0.eigenvectors.conj().T @ s1.eigenvectors) ** 2
    # rows/columns of zero eigenvalues never contribute
    rows, cols = lam > 0, mu > 0
    lam, mu, overlap = lam[rows], mu[cols], overlap[np.ix_(rows, cols)]

    def q(s: float) -> float:
        return float(spectral_power(lam, 1.0 - s) @ overlap @ spectral_power(mu, s))

    return q


def chernoff_numeric(pair: HypothesisPair) -> ChernoffResult:
    """Quantum Chernoff bound of the pair by direct minimisation over ``s``."""
    q, s = minimize_unit_interval(chernoff_curve(pair.rho0, pair.rho1))
    return ChernoffResult.from_minimum(q, s)


def analytic_q_unentangled(eta: float, b: float) -> ChernoffResult:
    """Minimum over ``s`` of ``1 - eta s + b((1 + eta/b)^s - 1)``.

    The stationary point is
    ``s* = ln(r / ln(1 + r)) / ln(1 + r)`` with ``r = eta/b``; it is compared
    against both endpoints, so out-of-range ``s*`` is handled.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if not b >= 0.0:
        raise DomainError(f"b must be >= 0, got {b}")
    if b == 0.0:
        return ChernoffResult.from_minimum(1.0 - eta, 1.0)
    if eta == 0.0:
        return ChernoffResult(1.0, 0.5, 0.0)
    r = eta / b
    log1r = math.log1p(r)

    def f(s: float) -> float:
        return 1.0 - eta * s + b * math.expm1(s * log1r)

    candidates = [0.0, 1.0]
    s_stat = math.log(r / log1r) / log1r
    if 0.0 <= s_stat <= 1.0:
        candidates.insert(0, s_stat)
    s_best = min(candidates, key=f)
    return ChernoffResult.from_minimum(f(s_best), s_best)


def analytic_q_entangled(eta: float, b: float, d: int) -> ChernoffResult:
    """Entangled probes reduce the background from ``b`` to ``b/d``."""
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    return analytic_q_unentangled(eta, b / d)


def regime(eta: float, b: float, d: int = 1, kind: Kind = Kind.UNENTANGLED) -> RegimeLabel:
    """Signal-to-noise regime; a ratio of exactly 1 counts as bad."""
    kind = Kind(kind)
    if b == 0.0:
        return RegimeLabel(Regime.GOOD, math.inf)
    ratio = eta / b * (d if kind is Kind.ENTANGLED else 1)
    return RegimeLabel(Regime.GOOD if ratio > 1.0 else Regime.BAD, ratio)


def q_regime_approx(eta: float, b: float, d: int = 1, kind: Kind = Kind.UNENTANGLED) -> float:
    """Leading-order ``Q``: ``1 - eta`` when good, ``1 - eta^2 d_eff / 8b`` when bad."""
    label = regime(eta, b, d, kind)
    if label.value is Regime.GOOD:
        return 1.0 - eta
    d_eff = d if Kind(kind) is Kind.ENTANGLED else 1
    return 1.0 - eta * eta * d_eff / (8.0 * b)


def conditional_probs(params: ScenarioParams, kind: Kind = Kind.UNENTANGLED) -> TrialOutcomeModel:
    """Yes/no statistics of the optimal per-shot measurement.

    A noise photon passes the test with probability ``b`` for a lone probe
    photon and ``b/d`` when it has to match an entangled ancilla.
    """
    kind = Kind(kind)
    noise = params.b / params.d if kind is Kind.ENTANGLED else params.b
    eta = params.eta
    return TrialOutcomeModel(noise, (1.0 - eta) * noise + eta, kind)


def classical_chernoff_bernoulli(model: TrialOutcomeModel) -> ChernoffResult:
    p0 = np.array([model.p_yes_given_absent, model.p_no_given_absent])
    p1 = np.array([model.p_yes_given_present, model.p_no_given_present])

    def f(s: float) -> float:
        return float(spectral_power(p0, 1.0 - s) @ spectral_power(p1, s))

    q, s = minimize_unit_interval(f)
    return ChernoffResult.from_minimum(q, s)


def trials_needed(q: float, epsilon: float) -> int:
    """Smallest ``n`` with ``q**n / 2 <= epsilon``."""
    if not 0.0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    if q >= 1.0:
        raise UnboundedTrialsError("q = 1: the hypotheses are indistinguishable")
    if q == 0.0:
        return 1
    n = max(1, math.ceil(math.log(2.0 * epsilon) / math.log(q)))
    # guard the ceil against rounding in the logs
    while n > 1 and 0.5 * q ** (n - 1) <= epsilon:
        n -= 1
    while 0.5 * q ** n > epsilon:
        n += 1
    return n
