"""Hypothesis states for target detection with single-photon probes.

Two hypotheses are modelled: the target is absent (only thermal background
returns) or present with reflectivity ``eta``. In the low-noise regime
``d*b << 1`` the background over ``d`` modes is truncated to the vacuum plus
one-photon sector. For entangled probes the signal photon is maximally
entangled with a retained ancilla photon over the same ``d`` modes.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, StructuralError
from .hilbert import (
    DensityMatrix,
    FockTuple,
    HermitianOperator,
    ancilla_basis,
    check_dim,
    ladder_basis,
    signal_basis,
    tensor,
    trace_distance,
)

# state construction needs a non-negative vacuum weight 1 - d*b with margin
DB_LIMIT = 0.5
# b = (1 - lam) * lam has no real root with lam < 1/2 beyond this
B_MAX_THERMAL = 0.25


class Kind(str, enum.Enum):
    UNENTANGLED = "unentangled"
    ENTANGLED = "entangled"


@dataclass(frozen=True)
class ScenarioParams:
    """Reflectivity ``eta``, per-mode thermal weight ``b``, mode count ``d``
    and the prior of the target-absent hypothesis."""

    eta: float
    b: float
    d: int = 1
    prior0: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {self.eta}")
        if not self.b >= 0.0:
            raise DomainError(f"b must be >= 0, got {self.b}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if not 0.0 <= self.prior0 <= 1.0:
            raise DomainError(f"prior0 must lie in [0, 1], got {self.prior0}")

    @property
    def prior1(self) -> float:
        return 1.0 - self.prior0

    @property
    def db(self) -> float:
        return self.d * self.b

    def require_state_domain(self) -> None:
        if self.db >= DB_LIMIT:
            raise DomainError(
                f"d*b = {self.db:g} >= {DB_LIMIT}: outside the low-noise approximation"
            )


@dataclass(frozen=True, eq=False)
class SignalSpec:
    """Single-photon signal state ``sum_k c_k |k>`` over ``d`` modes."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise DomainError("signal state needs at least one mode")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"signal amplitudes must have unit norm, got {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d(self) -> int:
        return self.amplitudes.size

    @classmethod
    def uniform(cls, d: int) -> "SignalSpec":
        return cls(np.full(d, 1.0 / math.sqrt(d)))

    @classmethod
    def mode(cls, d: int, k: int = 1) -> "SignalSpec":
        amps = np.zeros(d)
        amps[k - 1] = 1.0
        return cls(amps)


@dataclass(frozen=True, eq=False)
class HypothesisPair:
    rho0: DensityMatrix
    rho1: DensityMatrix
    kind: Kind

    def __post_init__(self):
        if not self.rho0.same_space(self.rho1):
            raise StructuralError("hypothesis states must share a basis")

    @property
    def dim(self) -> int:
        return self.rho0.dim


def _thermal_signal_matrix(b: float, d: int) -> np.ndarray:
    return np.diag([1.0 - d * b] + [b] * d).astype(complex)


def unentangled_pair(params: ScenarioParams, psi: Optional[SignalSpec] = None) -> HypothesisPair:
    """States returned from a single-photon probe ``psi`` without an ancilla.

    ``rho0 = (1 - d b)|vac><vac| + b sum_k |k><k|`` and
    ``rho1 = (1 - eta) rho0 + eta |psi><psi|``. ``psi`` defaults to the
    uniform superposition over the ``d`` modes.
    """
    params.require_state_domain()
    d = params.d
    if psi is None:
        psi = SignalSpec.uniform(d)
    if psi.d != d:
        raise StructuralError(f"signal state has {psi.d} modes, scenario has d={d}")
    basis = signal_basis(d)
    m0 = _thermal_signal_matrix(params.b, d)
    vec = np.concatenate([[0.0], psi.amplitudes])
    m1 = (1.0 - params.eta) * m0 + params.eta * np.outer(vec, vec.conj())
    return HypothesisPair(DensityMatrix(m0, basis), DensityMatrix(m1, basis), Kind.UNENTANGLED)


def psi_sa_vector(d: int) -> np.ndarray:
    """``(1/sqrt d) sum_k |k>_S |k>_A`` in the signal-major joint basis."""
    vec = np.zeros(d * (d + 1), dtype=complex)
    for k in range(1, d + 1):
        vec[k * d + (k - 1)] = 1.0 / math.sqrt(d)
    return vec


def entangled_pair(params: ScenarioParams, max_dim: Optional[int] = None) -> HypothesisPair:
    """Signal-ancilla states for a maximally entangled probe pair.

    With the signal lost, the ancilla is left maximally mixed:
    ``rho0 = rho_thermal (x) I_A/d``; with the target present,
    ``rho1 = (1 - eta) rho0 + eta |psi_SA><psi_SA|``.
    """
    params.require_state_domain()
    d = params.d
    check_dim(d * (d + 1), max_dim)
    sig = DensityMatrix(_thermal_signal_matrix(params.b, d), signal_basis(d))
    anc = DensityMatrix(np.eye(d) / d, ancilla_basis(d))
    rho0 = tensor(sig, anc, max_dim)
    vec = psi_sa_vector(d)
    m1 = (1.0 - params.eta) * rho0.matrix + params.eta * np.outer(vec, vec.conj())
    return HypothesisPair(rho0, DensityMatrix(m1, rho0.basis), Kind.ENTANGLED)


def build_pair(params: ScenarioParams, kind: Kind,
               psi: Optional[SignalSpec] = None) -> HypothesisPair:
    if Kind(kind) is Kind.ENTANGLED:
        return entangled_pair(params)
    return unentangled_pair(params, psi)


def thermal_lambda(b: float) -> float:
    """Smaller root of ``b = (1 - lam) lam``."""
    if not 0.0 <= b < B_MAX_THERMAL:
        raise DomainError(f"b must lie in [0, {B_MAX_THERMAL}) for a thermal mode, got {b}")
    # rationalised form of (1 - sqrt(1 - 4b)) / 2, stable for small b
    return 2.0 * b / (1.0 + math.sqrt(1.0 - 4.0 * b))


def exact_thermal(b: float, d: int, n_max: int, max_dim: Optional[int] = None) -> DensityMatrix:
    """Product of ``d`` geometric single-mode states truncated at ``n_max``.

    Each mode has weights ``p(n) ~ lam**n`` for ``n <= n_max``, renormalised,
    where ``lam`` solves ``b = (1 - lam) lam`` so that the one-photon weight
    of an untruncated mode is exactly ``b``.
    """
    lam = thermal_lambda(b)
    if n_max < 2:
        raise DomainError(f"n_max must be >= 2, got {n_max}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    dim = (n_max + 1) ** d
    check_dim(dim, max_dim)
    single = lam ** np.arange(n_max + 1)
    single = single / single.sum()
    diag = single
    for _ in range(d - 1):
        diag = np.kron(diag, single)
    basis = tuple(FockTuple(occ) for occ in itertools.product(range(n_max + 1), repeat=d))
    return DensityMatrix(np.diag(diag), basis)


def compress_low_photon(state: DensityMatrix, d: int) -> HermitianOperator:
    """Restrict a FockTuple-basis state to ``{vac, one photon in mode k}`` and
    put the remaining weight on a single overflow level (last index)."""
    index = {label: i for i, label in enumerate(state.basis)}
    keep = [index[FockTuple((0,) * d)]]
    for k in range(d):
        occ = [0] * d
        occ[k] = 1
        keep.append(index[FockTuple(tuple(occ))])
    block = state.matrix[np.ix_(keep, keep)]
    out = np.zeros((d + 2, d + 2), dtype=complex)
    out[: d + 1, : d + 1] = block
    out[d + 1, d + 1] = state.trace() - np.trace(block).real
    return HermitianOperator(out, ladder_basis(d + 2))


def approximation_gap(params: ScenarioParams, n_max: int = 4) -> float:
    """Trace norm between the exact thermal background and its low-photon
    truncation, compared on the ``{vac, single photon, overflow}`` space."""
    d, b = params.d, params.b
    exact = compress_low_photon(exact_thermal(b, d, n_max), d)
    approx = np.zeros((d + 2, d + 2), dtype=complex)
    approx[: d + 1, : d + 1] = unentangled_pair(params).rho0.matrix
    return trace_distance(exact, HermitianOperator(approx, exact.basis))


def ebits(d: int) -> float:
    """Entanglement, in e-bits, of a maximally entangled pair over ``d`` modes."""
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    return math.log2(d)


def thermal_b(x: float) -> float:
    """One-photon weight ``(1 - e^-x) e^-x`` of a thermal mode at ``x = hbar w / kT``."""
    if not x > 0:
        raise DomainError(f"x = hbar*omega/kT must be > 0, got {x}")
    return -math.expm1(-x) * math.exp(-x)


def mode_count(bandwidth: float, window: float) -> int:
    """Detector modes per detection event, ``d = W T``, rounded to an integer."""
    d = int(round(bandwidth * window))
    if d < 1:
        raise DomainError(f"bandwidth*window = {bandwidth * window:g} gives no modes")
    return d
