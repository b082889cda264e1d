r"""Fermionic operators, the exchange matrix and quadratic generators.

The operator vector is ``c = (c_1, ..., c_n, c_1^+, ..., c_n^+)``: annihilators
first, creators second. It is realised on ``C^(2^n)`` by a Jordan-Wigner
construction with the parity strings to the left,

    c_j = Z^(j-1) (x) A (x) I^(n-j),    A = [[0, 1], [0, 0]],  Z = diag(1, -1),

so basis index 0 is the vacuum. Anticommutators of linear forms reduce to
``{f^T c, c^T g} = f^T E g`` with ``E = [[0, I_n], [I_n, 0]]``.

Admissible generators
---------------------
A matrix ``H`` generates a unitary jump ``exp(-i/2 c^T H c)`` when
``H = -H^T`` and ``E conj(H) E = -H``. Writing ``H = [[A, B], [C, D]]``,
antisymmetry gives ``A = -A^T``, ``D = -D^T``, ``C = -B^T``, and the tilde
condition gives ``D = -conj(A)``, ``C = -conj(B)``. Together ``B^T = conj(B)``,
i.e. ``B`` is Hermitian, so every admissible generator has the form
``[[A, B], [-B^T, -conj(A)]]`` with complex antisymmetric ``A`` and Hermitian
``B``, and conversely.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .errors import ConstraintError, ShapeError, SizeLimitError

MAX_MODES = 6
GENERATOR_TOL = 1e-12

_A = np.array([[0, 1], [0, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True, eq=False)
class FermionRep:
    """Concrete ``2^n x 2^n`` matrices for the ``2n`` components of ``c``."""

    n: int
    ops: tuple

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def annihilators(self) -> tuple:
        return self.ops[: self.n]

    @property
    def creators(self) -> tuple:
        return self.ops[self.n :]


@lru_cache(maxsize=None)
def build_rep(n: int) -> FermionRep:
    """Jordan-Wigner representation of ``n`` fermionic modes, ``1 <= n <= 6``."""
    if not 1 <= n <= MAX_MODES:
        raise SizeLimitError(f"number of modes must be in [1, {MAX_MODES}], got {n}")
    annihilators = []
    for j in range(n):
        factors = [_Z] * j + [_A] + [_I2] * (n - j - 1)
        annihilators.append(linalg.kron_all(factors))
    creators = [a.conj().T for a in annihilators]
    return FermionRep(n=n, ops=tuple(linalg.frozen(m) for m in annihilators + creators))


def exchange_matrix(n: int) -> np.ndarray:
    """The ``2n x 2n`` matrix ``[[0, I_n], [I_n, 0]]``."""
    if n < 1:
        raise ShapeError("number of modes must be positive")
    e = np.zeros((2 * n, 2 * n), dtype=complex)
    e[:n, n:] = np.eye(n)
    e[n:, :n] = np.eye(n)
    return e


def _modes_of(k: np.ndarray) -> int:
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2:
        raise ShapeError(f"expected a square matrix of even dimension, got {k.shape}")
    return k.shape[0] // 2


def tilde(k) -> np.ndarray:
    """``E conj(k) E``: swaps the annihilator and creator blocks and conjugates."""
    k = np.asarray(k, dtype=complex)
    e = exchange_matrix(_modes_of(k))
    return e @ k.conj() @ e


def car_residual(rep: FermionRep) -> float:
    """Largest Frobenius residual of ``{ops[i], ops[j]} - E[i, j] I`` over all pairs."""
    e = exchange_matrix(rep.n)
    ident = np.eye(rep.dim)
    worst = 0.0
    for i, a in enumerate(rep.ops):
        for j, b in enumerate(rep.ops):
            worst = max(worst, linalg.frob_dist(a @ b + b @ a, e[i, j] * ident))
    return worst


def quadratic_form(k, rep: FermionRep) -> np.ndarray:
    """Hilbert-space matrix of ``c^T k c = sum_ij k[i, j] ops[i] ops[j]``."""
    k = np.asarray(k, dtype=complex)
    if k.shape != (2 * rep.n, 2 * rep.n):
        raise ShapeError(f"expected a {2 * rep.n}x{2 * rep.n} matrix, got {k.shape}")
    ops = np.stack(rep.ops)
    # sum_ij k_ij ops_i ops_j  ==  sum_i ops_i (sum_j k_ij ops_j)
    right = np.einsum("ij,jab->iab", k, ops)
    return np.einsum("iab,ibc->ac", ops, right)


@dataclass(frozen=True)
class GeneratorReport:
    antisymmetry_residual: float
    tilde_residual: float

    @property
    def valid(self) -> bool:
        return max(self.antisymmetry_residual, self.tilde_residual) <= GENERATOR_TOL


def validate_generator(h) -> GeneratorReport:
    """Max-abs residuals of ``h = -h^T`` and ``tilde(h) = -h``."""
    h = np.asarray(h, dtype=complex)
    _modes_of(h)
    return GeneratorReport(
        antisymmetry_residual=float(np.max(np.abs(h + h.T))),
        tilde_residual=float(np.max(np.abs(tilde(h) + h))),
    )


@dataclass(frozen=True, eq=False)
class QuadraticGenerator:
    """An admissible ``2n x 2n`` generator; validated on construction."""

    n: int
    h: np.ndarray

    def __post_init__(self):
        h = linalg.as_matrix(self.h)
        if h.shape != (2 * self.n, 2 * self.n):
            raise ShapeError(f"generator for n={self.n} must be {2 * self.n}x{2 * self.n}")
        report = validate_generator(h)
        if not report.valid:
            raise ConstraintError(
                "inadmissible generator: antisymmetry residual "
                f"{report.antisymmetry_residual:.3e}, tilde residual {report.tilde_residual:.3e}"
            )
        object.__setattr__(self, "h", linalg.frozen(h))

    def __eq__(self, other):
        if not isinstance(other, QuadraticGenerator):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.h, other.h)

    __hash__ = None

    @classmethod
    def from_blocks(cls, a, b) -> QuadraticGenerator:
        """Build ``[[a, b], [-b^T, -conj(a)]]`` from antisymmetric ``a`` and Hermitian ``b``."""
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        return cls(n=a.shape[0], h=np.block([[a, b], [-b.T, -a.conj()]]))

    def to_dict(self) -> dict:
        return {"n": self.n, "re": self.h.real.tolist(), "im": self.h.imag.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> QuadraticGenerator:
        h = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(n=int(data["n"]), h=h)


def random_generator(n: int, seed: int, scale: float = 1.0) -> QuadraticGenerator:
    """Random admissible generator with block entries of size ``O(scale)``.

    Deterministic in ``seed``.
    """
    if n < 1:
        raise ShapeError("number of modes must be positive")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = scale * (x - x.T) / 2
    b = scale * (y + y.conj().T) / 2
    return QuadraticGenerator.from_blocks(a, b)
