"""Closed-form propagation of moment tensors and ordered multi-time correlations.

Flattening convention: the element of an order-``M`` tensor with index tuple
``(i_1, ..., i_M)`` sits at the row-major flat position with ``i_1`` most
significant and stands for the operator product ``c_{i_1} c_{i_2} ... c_{i_M}``
read left to right. For multi-time tensors the first slot carries the
latest time, so element ``(i_1, ..., i_M)`` is
``<c_{i_1}(t_M) c_{i_2}(t_{M-1}) ... c_{i_M}(t_1)>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .car import FermionRep
from .channels import ChannelSet, check_moment_dim, moment_generator, partial_generator
from .errors import OrderingError, ShapeError
from .states import DensityState, check_density

TIME_EPS = 1e-15


@dataclass(frozen=True, eq=False)
class MomentTensor:
    n: int
    order: int
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex).ravel()
        if data.size != (2 * self.n) ** self.order:
            raise ShapeError(
                f"order-{self.order} tensor for n={self.n} needs {(2 * self.n) ** self.order} "
                f"entries, got {data.size}"
            )
        object.__setattr__(self, "data", linalg.frozen(data))

    def as_array(self) -> np.ndarray:
        """View as an array of shape ``(2n,) * order``."""
        return self.data.reshape((2 * self.n,) * self.order)

    def __getitem__(self, index):
        return self.as_array()[tuple(index)]

    def indices(self):
        return itertools.product(range(2 * self.n), repeat=self.order)

    def records(self) -> list:
        """``[{"index": [...], "re": x, "im": y}, ...]`` in flat order."""
        return [
            {"index": list(idx), "re": float(v.real), "im": float(v.imag)}
            for idx, v in zip(self.indices(), self.data)
        ]


def validate_times(times, order: int | None = None) -> tuple:
    times = tuple(float(t) for t in times)
    if order is not None and len(times) != order:
        raise OrderingError(f"expected {order} time points, got {len(times)}")
    if not times:
        raise OrderingError("at least one time point is required")
    if any(not np.isfinite(t) or t < 0 for t in times):
        raise OrderingError(f"time points must be finite and nonnegative: {times}")
    if any(b < a for a, b in zip(times, times[1:])):
        raise OrderingError(f"time points must be nondecreasing (t_1 <= ... <= t_M): {times}")
    return times


def operator_products(rep: FermionRep, order: int) -> np.ndarray:
    """Stack of all ``ops[i_1] ... ops[i_M]`` in flat (row-major) order."""
    dim = check_moment_dim(rep.n, order)
    linalg.check_size(dim * rep.dim, rep.dim, "operator product stack")
    ops = np.stack(rep.ops)
    prods = ops
    for _ in range(order - 1):
        # new trailing index is least significant
        prods = np.einsum("pab,qbc->pqac", prods, ops).reshape(-1, rep.dim, rep.dim)
    return prods


def initial_moments(rho, rep: FermionRep, order: int) -> MomentTensor:
    """``tr(rho ops[i_1] ... ops[i_M])`` for every index tuple."""
    if isinstance(rho, DensityState):
        rho = rho.rho
    rho = check_density(rho, 1e-10, 1e-10, 1e-10)
    if rho.shape[0] != rep.dim:
        raise ShapeError(f"state dimension {rho.shape[0]} does not match n={rep.n}")
    prods = operator_products(rep, order)
    # tr(rho P) = sum_ab rho_ab P_ba
    data = np.einsum("ab,pba->p", rho, prods)
    return MomentTensor(rep.n, order, data)


def _check_channels(m0: MomentTensor, cs: ChannelSet):
    if m0.n != cs.n:
        raise ShapeError(f"moments are for n={m0.n} but channels act on n={cs.n}")


def propagate_moments(m0: MomentTensor, cs: ChannelSet, t: float) -> MomentTensor:
    """``expm(sum_k lam_k (O_k^{(x)M} - I) t) m0``."""
    _check_channels(m0, cs)
    (t,) = validate_times([t])
    if t < TIME_EPS:
        return m0
    prop = linalg.expm(moment_generator(cs, m0.order) * t)
    return MomentTensor(m0.n, m0.order, prop @ m0.data)


def multitime_correlations(m0: MomentTensor, cs: ChannelSet, times) -> MomentTensor:
    """Ordered Markovian correlation tensor ``<c(t_M) (x) ... (x) c(t_1)>``.

    Parameters
    ----------
    m0 : MomentTensor
        Initial moments of order ``M``.
    cs : ChannelSet
    times : sequence of float
        ``t_1 <= ... <= t_M``, all nonnegative.

    Notes
    -----
    The propagator is ``e^{L_{M,1}(t_M - t_{M-1})} ... e^{L_{M,M-1}(t_2 - t_1)} e^{L_{M,M} t_1}``
    where ``L_{M,m}`` acts with the order-``m`` generator on the leading
    ``m`` slots. The rightmost factor is applied first.
    """
    _check_channels(m0, cs)
    big_m = m0.order
    times = validate_times(times, big_m)
    # gap paired with L_{M,m}: t_1 for m = M, t_{M-m+1} - t_{M-m} otherwise
    gaps = [times[0]] + [b - a for a, b in zip(times, times[1:])]
    state = m0.data
    for m, gap in zip(range(big_m, 0, -1), gaps):
        if gap < TIME_EPS:
            continue
        state = linalg.expm(partial_generator(cs, big_m, m) * gap) @ state
    return MomentTensor(m0.n, big_m, state)
