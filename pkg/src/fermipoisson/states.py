"""Density matrices and standard initial states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ShapeError, StateValidationError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-10


def density_defects(rho: np.ndarray) -> dict:
    """Hermiticity, trace and positivity defects of ``rho``."""
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace_err = abs(complex(np.trace(rho)) - 1.0)
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    return {"hermiticity": herm, "trace": trace_err, "min_eigenvalue": min_eig}


def check_density(rho, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, eig_tol=EIGEN_TOL,
                  error=StateValidationError) -> np.ndarray:
    rho = linalg.as_matrix(rho)
    dim = rho.shape[0]
    if rho.shape[1] != dim or dim & (dim - 1):
        raise ShapeError(f"density matrix must be square with power-of-two size, got {rho.shape}")
    d = density_defects(rho)
    if d["hermiticity"] > herm_tol:
        raise error(f"density matrix is not Hermitian (residual {d['hermiticity']:.3e})")
    if d["trace"] > trace_tol:
        raise error(f"density matrix trace differs from 1 by {d['trace']:.3e}")
    if d["min_eigenvalue"] < -eig_tol:
        raise error(f"density matrix has negative eigenvalue {d['min_eigenvalue']:.3e}")
    return rho


@dataclass(frozen=True, eq=False)
class DensityState:
    """A validated density matrix on ``2^n`` dimensions."""

    rho: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", linalg.frozen(check_density(self.rho)))

    @classmethod
    def trusted(cls, rho) -> DensityState:
        """Wrap ``rho`` without re-validating; callers check physicality themselves."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "rho", linalg.frozen(rho))
        return obj

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    def to_dict(self) -> dict:
        return {"n": self.n, "re": self.rho.real.tolist(), "im": self.rho.imag.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> DensityState:
        rho = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        state = cls(rho)
        if state.n != int(data["n"]):
            raise ShapeError(f"matrix size {state.dim} does not match n={data['n']}")
        return state


def as_density(state) -> np.ndarray:
    """Accept a :class:`DensityState`, a raw matrix, or a state vector (promoted
    to a rank-1 projector) and return a validated density matrix."""
    if isinstance(state, DensityState):
        return state.rho
    if np.ndim(state) == 1:
        return pure(state).rho
    return check_density(state)


def pure(amplitudes) -> DensityState:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise StateValidationError("state vector is zero")
    psi = psi / norm
    return DensityState(np.outer(psi, psi.conj()))


def basis(n: int, index: int) -> DensityState:
    dim = 2**n
    if not 0 <= index < dim:
        raise ShapeError(f"basis index {index} out of range for n={n}")
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return pure(psi)


def vacuum(n: int) -> DensityState:
    """Index 0 of the Jordan-Wigner basis is annihilated by every ``c_j``."""
    return basis(n, 0)


def random_pure(n: int, seed: int) -> DensityState:
    rng = np.random.default_rng(seed)
    dim = 2**n
    return pure(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def random_mixed(n: int, seed: int, rank: int | None = None) -> DensityState:
    """Random full- or fixed-rank mixed state, ``rho = G G^+ / tr(G G^+)``."""
    rng = np.random.default_rng(seed)
    dim = 2**n
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityState(rho / np.trace(rho).real)
