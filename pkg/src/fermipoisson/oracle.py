"""Brute-force reference dynamics on full density matrices.

Vectorisation is column stacking, ``vec(X) = X.reshape(-1, order="F")``, so
that ``vec(A X B) = (B^T (x) A) vec(X)``. Nothing here uses the one-particle
matrices ``O_k``; moments and correlations are read off by explicit traces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .car import FermionRep, build_rep
from .channels import ChannelSet, moment_generator
from .errors import NumericalFailureError, ShapeError, SizeLimitError
from .moments import MomentTensor, validate_times
from .states import DensityState, as_density, check_density

MAX_EVOLVE_MODES = 5
MAX_CORRELATION_MODES = 3
EVOLVED_TOL = 1e-8


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    n: int
    matrix: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        dim = 2**self.n
        return unvec(self.matrix @ vec(x), dim)

    def propagator(self, t: float) -> Superoperator:
        return Superoperator(self.n, linalg.expm(self.matrix * t))

    def trace_defect(self) -> float:
        """Norm of ``vec(I)^+ L``; zero for trace-preserving generators."""
        return float(np.linalg.norm(vec(np.eye(2**self.n)).conj() @ self.matrix))


def _check_envelope(n: int, limit: int, what: str):
    if n > limit:
        raise SizeLimitError(f"{what} oracle supports n <= {limit}, got n={n}")
    linalg.check_size(4**n, 4**n, "Liouvillian")


def liouvillian(cs: ChannelSet, rep: FermionRep | None = None) -> Superoperator:
    """``sum_k lam_k (conj(U_k) (x) U_k - I)``, the matrix of ``rho -> sum lam (U rho U^+ - rho)``."""
    rep = rep or build_rep(cs.n)
    if rep.n != cs.n:
        raise ShapeError("channel set and representation disagree on n")
    _check_envelope(cs.n, MAX_EVOLVE_MODES, "evolution")
    dim = rep.dim
    mat = np.zeros((dim * dim, dim * dim), dtype=complex)
    for ch in cs:
        u = ch.unitary
        mat += ch.rate * linalg.kron(u.conj(), u)
    mat -= cs.total_rate * np.eye(dim * dim)
    return Superoperator(cs.n, mat)


def gksl_liouvillian(cs: ChannelSet, rep: FermionRep | None = None) -> Superoperator:
    """Generator in standard form with ``L_k = sqrt(lam_k) U_k``.

    ``rho -> sum_k L rho L^+ - 1/2 L^+ L rho - 1/2 rho L^+ L``.
    """
    rep = rep or build_rep(cs.n)
    _check_envelope(cs.n, MAX_EVOLVE_MODES, "evolution")
    dim = rep.dim
    ident = np.eye(dim)
    mat = np.zeros((dim * dim, dim * dim), dtype=complex)
    for ch in cs:
        jump = np.sqrt(ch.rate) * ch.unitary
        ldl = jump.conj().T @ jump
        mat += linalg.kron(jump.conj(), jump)
        mat -= 0.5 * linalg.kron(ident, ldl)
        mat -= 0.5 * linalg.kron(ldl.T, ident)
    return Superoperator(cs.n, mat)


def adjoint_superoperator(cs: ChannelSet, rep: FermionRep | None = None) -> Superoperator:
    """Matrix of ``X -> sum_k lam_k (U_k^+ X U_k - X)``."""
    rep = rep or build_rep(cs.n)
    _check_envelope(cs.n, MAX_EVOLVE_MODES, "evolution")
    dim = rep.dim
    mat = np.zeros((dim * dim, dim * dim), dtype=complex)
    for ch in cs:
        u = ch.unitary
        mat += ch.rate * linalg.kron(u.T, u.conj().T)
    mat -= cs.total_rate * np.eye(dim * dim)
    return Superoperator(cs.n, mat)


def apply_generator(x, cs: ChannelSet) -> np.ndarray:
    """``sum_k lam_k (U_k X U_k^+ - X)`` evaluated directly on a matrix."""
    x = np.asarray(x, dtype=complex)
    out = np.zeros_like(x)
    for ch in cs:
        u = ch.unitary
        out += ch.rate * (u @ x @ u.conj().T - x)
    return out


def adjoint_apply(x, cs: ChannelSet, rep: FermionRep | None = None) -> np.ndarray:
    """``sum_k lam_k (U_k^+ X U_k - X)``."""
    rep = rep or build_rep(cs.n)
    x = np.asarray(x, dtype=complex)
    if x.shape != (rep.dim, rep.dim):
        raise ShapeError(f"expected a {rep.dim}x{rep.dim} operator, got {x.shape}")
    out = np.zeros_like(x)
    for ch in cs:
        u = ch.unitary
        out += ch.rate * (u.conj().T @ x @ u - x)
    return out


def evolve_density(rho0, cs: ChannelSet, t: float, rep: FermionRep | None = None) -> DensityState:
    """Exact ``rho_t = exp(L t) rho_0``; raises if the result drifts beyond 1e-8."""
    rho0 = as_density(rho0)
    (t,) = validate_times([t])
    if t == 0.0:
        return DensityState.trusted(rho0)
    prop = liouvillian(cs, rep).propagator(t)
    rho_t = prop.apply(rho0)
    check_density(rho_t, EVOLVED_TOL, EVOLVED_TOL, EVOLVED_TOL, error=NumericalFailureError)
    return DensityState.trusted(rho_t)


def _product_by_indices(rep: FermionRep, idx) -> np.ndarray:
    out = np.eye(rep.dim, dtype=complex)
    for i in idx:
        out = out @ rep.ops[i]
    return out


def density_moments(rho, rep: FermionRep, order: int) -> MomentTensor:
    """Moments ``tr(rho c_{i_1} ... c_{i_M})`` by one explicit product per index tuple."""
    rho = as_density(rho)
    data = [
        np.trace(rho @ _product_by_indices(rep, idx))
        for idx in itertools.product(range(2 * rep.n), repeat=order)
    ]
    return MomentTensor(rep.n, order, np.array(data))


def oracle_moments(rho0, cs: ChannelSet, t: float, order: int,
                   rep: FermionRep | None = None) -> MomentTensor:
    rep = rep or build_rep(cs.n)
    return density_moments(evolve_density(rho0, cs, t, rep), rep, order)


def oracle_multitime(rho0, cs: ChannelSet, times, rep: FermionRep | None = None) -> MomentTensor:
    """Ordered correlations by alternating semigroup evolution and left insertions.

    Element ``(i_1, ..., i_M)`` is
    ``tr(c_{i_1} P_{t_M - t_{M-1}}(... c_{i_{M-1}} P_{t_2 - t_1}(c_{i_M} P_{t_1}(rho_0))))``
    with ``P_s = exp(L s)`` acting on arbitrary (non-Hermitian) matrices.
    """
    rep = rep or build_rep(cs.n)
    _check_envelope(cs.n, MAX_CORRELATION_MODES, "correlation")
    rho0 = as_density(rho0)
    times = validate_times(times)
    big_m = len(times)
    gen = liouvillian(cs, rep)
    dim = rep.dim

    def evolve(x, s):
        if s == 0.0:
            return x
        return unvec(linalg.expm(gen.matrix * s) @ vec(x), dim)

    # chain[suffix] holds P(c_{i_m} ... P_{t_1}(rho0)) for the innermost index tuple
    chain = {(): evolve(rho0, times[0])}
    for level in range(1, big_m):
        gap = times[level] - times[level - 1]
        prop = linalg.expm(gen.matrix * gap) if gap > 0 else None
        nxt = {}
        for suffix, x in chain.items():
            for i, op in enumerate(rep.ops):
                y = op @ x
                nxt[(i,) + suffix] = y if prop is None else unvec(prop @ vec(y), dim)
        chain = nxt
    data = []
    for idx in itertools.product(range(2 * rep.n), repeat=big_m):
        data.append(np.trace(rep.ops[idx[0]] @ chain[idx[1:]]))
    return MomentTensor(rep.n, big_m, np.array(data))


def heisenberg_residual(cs: ChannelSet, order: int, rep: FermionRep | None = None) -> float:
    """Max Frobenius gap between ``L*`` on each product ``c_{i_1}...c_{i_M}`` and the
    corresponding row of the moment-space generator applied to all products."""
    rep = rep or build_rep(cs.n)
    gen = moment_generator(cs, order)
    indices = list(itertools.product(range(2 * rep.n), repeat=order))
    prods = np.stack([_product_by_indices(rep, idx) for idx in indices])
    predicted = np.einsum("pq,qab->pab", gen, prods)
    return max(
        linalg.frob_dist(adjoint_apply(prods[p], cs, rep), predicted[p]) for p in range(len(indices))
    )
