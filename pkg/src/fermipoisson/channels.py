"""Poisson jump channels and their moment-space generators.

A channel is a rate ``lam > 0`` together with an admissible generator ``H``.
It induces a Hilbert-space jump ``U = exp(-i/2 c^T H c)`` and the
one-particle matrix ``O = exp(-i E H)`` with ``U^+ c U = O c``. Moments of
order ``m`` then evolve under ``sum_k lam_k (O_k^{(x)m} - I)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .car import (
    FermionRep,
    QuadraticGenerator,
    build_rep,
    exchange_matrix,
    quadratic_form,
    tilde,
)
from .errors import ConstraintError, ShapeError, SizeLimitError

DEFAULT_MOMENT_ROW_CAP = 2**20

_moment_row_cap = DEFAULT_MOMENT_ROW_CAP


def set_moment_row_cap(rows: int) -> None:
    global _moment_row_cap
    _moment_row_cap = int(rows)


def check_moment_dim(n: int, order: int) -> int:
    """Return ``(2n)^order``, raising if it exceeds the moment-space cap."""
    if order < 1:
        raise ValueError("moment order must be at least 1")
    dim = (2 * n) ** order
    if dim > _moment_row_cap:
        raise SizeLimitError(
            f"moment space of order {order} for n={n} has {dim} rows, cap is {_moment_row_cap}"
        )
    linalg.check_size(dim, dim, "moment generator")
    return dim


def _as_generator(gen) -> QuadraticGenerator:
    if isinstance(gen, QuadraticGenerator):
        return gen
    h = linalg.as_matrix(gen)
    return QuadraticGenerator(n=h.shape[0] // 2, h=h)


def one_particle_matrix(gen) -> np.ndarray:
    """``O = expm(-i E H)``."""
    gen = _as_generator(gen)
    return linalg.expm(-1j * exchange_matrix(gen.n) @ gen.h)


def jump_unitary(gen, rep: FermionRep) -> np.ndarray:
    """``U = expm(-i/2 c^T H c)`` on the ``2^n``-dimensional Fock space."""
    gen = _as_generator(gen)
    if gen.n != rep.n:
        raise ShapeError(f"generator has n={gen.n} but representation has n={rep.n}")
    return linalg.expm(-0.5j * quadratic_form(gen.h, rep))


@dataclass(frozen=True, eq=False)
class JumpChannel:
    """One Poisson jump: rate and generator, with ``O`` cached eagerly and ``U`` lazily."""

    rate: float
    gen: QuadraticGenerator
    one_particle: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rate = float(self.rate)
        if not np.isfinite(rate) or rate <= 0:
            raise ConstraintError(f"jump rate must be positive and finite, got {self.rate}")
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "gen", _as_generator(self.gen))
        object.__setattr__(self, "one_particle", linalg.frozen(one_particle_matrix(self.gen)))
        object.__setattr__(self, "_lock", threading.Lock())
        object.__setattr__(self, "_unitary", None)

    @property
    def n(self) -> int:
        return self.gen.n

    @property
    def unitary(self) -> np.ndarray:
        if self._unitary is None:
            with self._lock:
                if self._unitary is None:
                    u = linalg.frozen(jump_unitary(self.gen, build_rep(self.n)))
                    object.__setattr__(self, "_unitary", u)
        return self._unitary

    def to_dict(self) -> dict:
        return {"rate": self.rate, "generator": self.gen.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> JumpChannel:
        return cls(rate=data["rate"], gen=QuadraticGenerator.from_dict(data["generator"]))


@dataclass(frozen=True, eq=False)
class ChannelSet:
    n: int
    channels: tuple

    def __post_init__(self):
        channels = tuple(self.channels)
        if not channels:
            raise ConstraintError("a channel set needs at least one channel")
        for k, ch in enumerate(channels):
            if ch.n != self.n:
                raise ShapeError(f"channel {k} acts on n={ch.n} modes, expected {self.n}")
        object.__setattr__(self, "channels", channels)

    @classmethod
    def of(cls, *channels: JumpChannel) -> ChannelSet:
        return cls(n=channels[0].n, channels=channels)

    def __len__(self):
        return len(self.channels)

    def __iter__(self):
        return iter(self.channels)

    @property
    def rates(self) -> np.ndarray:
        return np.array([ch.rate for ch in self.channels])

    @property
    def total_rate(self) -> float:
        return float(self.rates.sum())

    def to_list(self) -> list:
        return [ch.to_dict() for ch in self.channels]

    @classmethod
    def from_list(cls, items: list) -> ChannelSet:
        return cls.of(*(JumpChannel.from_dict(d) for d in items))


def conjugation_check(ch: JumpChannel, rep: FermionRep) -> float:
    """Largest ``||U^+ ops[j] U - sum_l O[j, l] ops[l]||_F`` over ``j``."""
    if ch.n != rep.n:
        raise ShapeError("channel and representation disagree on n")
    u = ch.unitary
    o = ch.one_particle
    ops = np.stack(rep.ops)
    rotated = np.einsum("jl,lab->jab", o, ops)
    return max(
        linalg.frob_dist(u.conj().T @ op @ u, rotated[j]) for j, op in enumerate(rep.ops)
    )


def channel_residuals(ch: JumpChannel, rep: FermionRep | None = None) -> dict:
    """All per-channel structural residuals, keyed by name."""
    rep = rep or build_rep(ch.n)
    o = ch.one_particle
    e = exchange_matrix(ch.n)
    u = ch.unitary
    return {
        "conjugation": conjugation_check(ch, rep),
        "car_preservation": linalg.frob_dist(o @ e @ o.T, e),
        "reality": linalg.frob_dist(tilde(o), o),
        "unitarity": linalg.frob_dist(u.conj().T @ u, np.eye(rep.dim)),
    }


def moment_generator(cs: ChannelSet, m: int) -> np.ndarray:
    """``sum_k lam_k (O_k^{(x)m} - I_{(2n)^m})``."""
    dim = check_moment_dim(cs.n, m)
    gen = np.zeros((dim, dim), dtype=complex)
    for ch in cs:
        gen += ch.rate * linalg.kron_power(ch.one_particle, m)
    gen -= cs.total_rate * np.eye(dim)
    return gen


def partial_generator(cs: ChannelSet, big_m: int, m: int) -> np.ndarray:
    """The order-``m`` generator acting on the leading ``m`` of ``big_m`` tensor slots."""
    if not 1 <= m <= big_m:
        raise ValueError(f"need 1 <= m <= M, got m={m}, M={big_m}")
    check_moment_dim(cs.n, big_m)
    gen = moment_generator(cs, m)
    if m == big_m:
        return gen
    return linalg.kron(gen, np.eye((2 * cs.n) ** (big_m - m)))
