"""Dense complex matrix kernel.

Every matrix in the package is a two-dimensional ``complex128`` numpy array
in row-major (C) order. This module adds the few things numpy does not give
directly: a hard cap on dense object size, a Kronecker product that honours
it, and a scaling-and-squaring Padé matrix exponential with a fixed accuracy
contract (no tolerance knob).
"""

from __future__ import annotations

import contextlib
import math
from functools import reduce

import numpy as np

from .errors import ShapeError, SizeLimitError

DEFAULT_SIZE_CAP = 2**26

_size_cap = DEFAULT_SIZE_CAP


def get_size_cap() -> int:
    """Maximum number of entries any dense matrix may hold."""
    return _size_cap


def set_size_cap(entries: int) -> None:
    global _size_cap
    if entries < 1:
        raise ValueError("size cap must be positive")
    _size_cap = int(entries)


@contextlib.contextmanager
def size_cap(entries: int):
    """Temporarily replace the size cap."""
    previous = get_size_cap()
    set_size_cap(entries)
    try:
        yield
    finally:
        set_size_cap(previous)


def check_size(rows: int, cols: int, what: str = "matrix") -> None:
    if rows * cols > _size_cap:
        raise SizeLimitError(
            f"{what} of shape ({rows}, {cols}) exceeds size cap of {_size_cap} entries"
        )


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite complex matrix, raising on bad input."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def frozen(a: np.ndarray) -> np.ndarray:
    """Return ``a`` marked read-only, for values cached on immutable objects."""
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def identity(dim: int) -> np.ndarray:
    check_size(dim, dim, "identity")
    return np.eye(dim, dtype=complex)


def kron(a, b) -> np.ndarray:
    """Kronecker product.

    Entry ``(i*b.rows + p, j*b.cols + q)`` of the result is ``a[i, j] * b[p, q]``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("kron expects 2-D operands")
    check_size(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], "kron result")
    return np.kron(a, b)


def kron_power(a, m: int) -> np.ndarray:
    """``a`` tensored with itself ``m`` times (``m >= 1``)."""
    if m < 1:
        raise ValueError("kron power must be at least 1")
    return reduce(kron, [a] * m)


def kron_all(mats) -> np.ndarray:
    return reduce(kron, mats)


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def trace(a) -> complex:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"trace of non-square matrix with shape {a.shape}")
    return complex(np.trace(a))


def frob_dist(a, b) -> float:
    """Frobenius norm of ``a - b``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    return a @ b + b @ a


# Padé coefficients b_j and 1-norm thresholds theta_m from Higham (2005),
# "The scaling and squaring method for the matrix exponential revisited".
_PADE9 = (
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0, 110880.0, 3960.0, 90.0, 1.0,
)
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
    16380.0, 182.0, 1.0,
)
_THETA9 = 2.097847961257068
_THETA13 = 5.371920351148152


def _pade9(a, ident):
    b = _PADE9
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    a8 = a6 @ a2
    u = a @ (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    return u, v


def _pade13(a, ident):
    b = _PADE13
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (
        a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
        + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident
    )
    v = (
        a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
        + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    )
    return u, v


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [9/9] or [13/13] Padé approximant.

    Parameters
    ----------
    a : (N, N) array_like
        Square matrix.

    Returns
    -------
    (N, N) complex ndarray
        ``exp(a)``, accurate to a few ulps times ``N`` for well-conditioned input.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"expm of non-square matrix with shape {a.shape}")
    dim = a.shape[0]
    ident = np.eye(dim, dtype=complex)
    norm = np.linalg.norm(a, 1)
    if norm == 0.0:
        return ident
    if norm <= _THETA9:
        u, v = _pade9(a, ident)
        squarings = 0
    else:
        squarings = max(0, math.ceil(math.log2(norm / _THETA13)))
        u, v = _pade13(a / 2.0**squarings, ident)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(squarings):
        r = r @ r
    return r
