"""Dense Hermitian operator algebra on labeled finite bases.

Operators are immutable: every constructor copies its input and marks the
array read-only, so values can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, DomainError, EigenSolverError, StructuralError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
# eigenvalues in [-PSD_TOL, PSD_TOL] are treated as exact zeros
PSD_TOL = 1e-10
POSITIVE_TOL = 1e-12
DEFAULT_MAX_DIM = 4160


@dataclass(frozen=True)
class SignalVacuum:
    def __str__(self) -> str:
        return "vac"


@dataclass(frozen=True)
class SignalMode:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"signal mode index must be >= 1, got {self.k}")

    def __str__(self) -> str:
        return f"S{self.k}"


@dataclass(frozen=True)
class AncillaMode:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"ancilla mode index must be >= 1, got {self.k}")

    def __str__(self) -> str:
        return f"A{self.k}"


@dataclass(frozen=True)
class JointProduct:
    signal: "BasisLabel"
    ancilla: "BasisLabel"

    def __str__(self) -> str:
        return f"{self.signal}|{self.ancilla}"


@dataclass(frozen=True)
class FockTuple:
    occupations: tuple

    def __post_init__(self):
        if any(n < 0 for n in self.occupations):
            raise DomainError(f"negative occupation in {self.occupations}")

    def __str__(self) -> str:
        return "(" + ",".join(str(n) for n in self.occupations) + ")"


BasisLabel = Union[SignalVacuum, SignalMode, AncillaMode, JointProduct, FockTuple]


def signal_basis(d: int) -> tuple:
    """``[vac, mode 1, ..., mode d]``."""
    if d < 1:
        raise DomainError(f"mode count d must be >= 1, got {d}")
    return (SignalVacuum(),) + tuple(SignalMode(k) for k in range(1, d + 1))


def ancilla_basis(d: int) -> tuple:
    if d < 1:
        raise DomainError(f"mode count d must be >= 1, got {d}")
    return tuple(AncillaMode(k) for k in range(1, d + 1))


def ladder_basis(dim: int) -> tuple:
    """Single-mode number states ``|0>, ..., |dim-1>``."""
    return tuple(FockTuple((n,)) for n in range(dim))


def check_dim(dim: int, max_dim: Optional[int] = None) -> None:
    cap = DEFAULT_MAX_DIM if max_dim is None else max_dim
    if dim > cap:
        raise CapacityError(f"dimension {dim} exceeds cap {cap}")


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian matrix together with the labels of its basis.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix. Must equal its conjugate transpose to within
        ``HERMITIAN_TOL`` (max absolute entry deviation).
    basis : sequence of BasisLabel, optional
        Labels of the rows/columns. Defaults to a single-mode number ladder.
    """

    matrix: np.ndarray
    basis: tuple = field(default=None)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StructuralError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("operator has non-finite entries")
        dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if dev > HERMITIAN_TOL:
            raise DomainError(f"operator is not Hermitian (max deviation {dev:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        basis = ladder_basis(m.shape[0]) if self.basis is None else tuple(self.basis)
        if len(basis) != m.shape[0]:
            raise StructuralError(
                f"basis has {len(basis)} labels for a {m.shape[0]}-dim operator"
            )
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def expectation(self, vec: np.ndarray) -> float:
        vec = np.asarray(vec, dtype=complex)
        return float(np.real(vec.conj() @ self.matrix @ vec))

    def same_space(self, other: "HermitianOperator") -> bool:
        return self.dim == other.dim and self.basis == other.basis

    def _require_same_space(self, other: "HermitianOperator") -> None:
        if not self.same_space(other):
            raise StructuralError(
                f"operators live on different spaces (dims {self.dim} and {other.dim})"
            )

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._require_same_space(other)
        return HermitianOperator(self.matrix + other.matrix, self.basis)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._require_same_space(other)
        return HermitianOperator(self.matrix - other.matrix, self.basis)

    def scaled(self, c: float) -> "HermitianOperator":
        return HermitianOperator(float(c) * self.matrix, self.basis)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class DensityMatrix(HermitianOperator):
    """Unit-trace positive semidefinite :class:`HermitianOperator`."""

    def __post_init__(self):
        super().__post_init__()
        tr = np.trace(self.matrix).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"density matrix trace is {tr!r}, expected 1")
        lam_min = np.linalg.eigvalsh(self.matrix)[0] if self.dim else 0.0
        if lam_min < -PSD_TOL:
            raise DomainError(f"density matrix has eigenvalue {lam_min:.3e} < 0")

    @classmethod
    def from_operator(cls, op: HermitianOperator) -> "DensityMatrix":
        return cls(op.matrix, op.basis)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def identity(basis: Sequence) -> HermitianOperator:
    basis = tuple(basis)
    return HermitianOperator(np.eye(len(basis)), basis)


def projector(vec: np.ndarray, basis: Optional[Sequence] = None) -> HermitianOperator:
    """Rank-one projector onto the normalised direction of ``vec``."""
    vec = np.asarray(vec, dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise DomainError("cannot project onto the zero vector")
    vec = vec / norm
    return HermitianOperator(np.outer(vec, vec.conj()), basis)


def tensor(a: HermitianOperator, b: HermitianOperator,
           max_dim: Optional[int] = None) -> HermitianOperator:
    """Kronecker product, ``a`` index major.

    The result is a :class:`DensityMatrix` when both factors are.
    """
    check_dim(a.dim * b.dim, max_dim)
    basis = tuple(JointProduct(x, y) for x in a.basis for y in b.basis)
    m = np.kron(a.matrix, b.matrix)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(m, basis)
    return HermitianOperator(m, basis)


def eig_hermitian(h: HermitianOperator) -> Spectrum:
    """Full eigendecomposition with eigenvalues sorted in descending order."""
    try:
        lam, vecs = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        norm = np.linalg.norm(h.matrix)
        raise EigenSolverError(h.dim, f"{exc} (Frobenius norm {norm:.3e})") from exc
    order = np.argsort(lam, kind="stable")[::-1]
    lam = lam[order]
    vecs = vecs[:, order]
    lam.setflags(write=False)
    vecs.setflags(write=False)
    return Spectrum(lam, vecs)


def _clipped_eigenvalues(spec: Spectrum) -> np.ndarray:
    lam = np.array(spec.eigenvalues)
    if lam.size and lam[-1] < -PSD_TOL:
        raise DomainError(f"operator is not positive semidefinite (eigenvalue {lam[-1]:.3e})")
    lam[np.abs(lam) <= PSD_TOL] = 0.0
    return lam


def spectral_power(lam: np.ndarray, s: float) -> np.ndarray:
    """Elementwise ``lam**s`` with ``0**s == 0`` for every ``s``."""
    out = np.zeros_like(lam)
    mask = lam > 0
    out[mask] = lam[mask] ** s
    return out


def dm_power(rho: HermitianOperator, s: float) -> HermitianOperator:
    """Fractional power ``rho**s`` for ``s`` in [0, 1].

    Zero eigenvalues stay zero for every exponent, so ``s = 0`` gives the
    projector onto the support of ``rho`` rather than the identity.
    """
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"exponent s must lie in [0, 1], got {s}")
    spec = eig_hermitian(rho)
    lam = spectral_power(_clipped_eigenvalues(spec), s)
    v = spec.eigenvectors
    m = (v * lam) @ v.conj().T
    return HermitianOperator(0.5 * (m + m.conj().T), rho.basis)


def trace_distance(a: HermitianOperator, b: HermitianOperator) -> float:
    """Trace norm ``||a - b||_1``, not halved; ranges over [0, 2] for states."""
    if not a.same_space(b):
        raise StructuralError(
            f"trace_distance needs operators on the same basis (dims {a.dim}, {b.dim})"
        )
    return float(np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))


def positive_part_projector(delta: HermitianOperator) -> HermitianOperator:
    """Projector onto the eigenvectors of ``delta`` with eigenvalue > 1e-12."""
    spec = eig_hermitian(delta)
    v = spec.eigenvectors[:, spec.eigenvalues > POSITIVE_TOL]
    m = v @ v.conj().T
    return HermitianOperator(0.5 * (m + m.conj().T), delta.basis)
