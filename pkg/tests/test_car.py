import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fermipoisson import car
from fermipoisson.errors import ConstraintError, ShapeError, SizeLimitError
from fermipoisson.linalg import frob_dist


def anticomm(a, b):
    return a @ b + b @ a


def test_single_mode_matrices():
    rep = car.build_rep(1)
    assert np.array_equal(rep.ops[0], [[0, 1], [0, 0]])
    assert np.array_equal(rep.ops[1], [[0, 0], [1, 0]])


def test_two_modes_exact_car():
    rep = car.build_rep(2)
    c1, c2 = rep.annihilators
    c1d, c2d = rep.creators
    assert np.array_equal(anticomm(c1, c2d), np.zeros((4, 4)))
    assert np.array_equal(anticomm(c1, c1d), np.eye(4))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_car_sweep(n):
    rep = car.build_rep(n)
    e = car.exchange_matrix(n)
    ident = np.eye(2**n)
    for i, j in itertools.product(range(2 * n), repeat=2):
        residual = frob_dist(anticomm(rep.ops[i], rep.ops[j]), e[i, j] * ident)
        assert residual <= 1e-13


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_adjoint_pairing_exact(n):
    rep = car.build_rep(n)
    for i in range(n):
        assert np.array_equal(rep.ops[n + i], rep.ops[i].conj().T)


@pytest.mark.parametrize("n", [0, 7])
def test_build_rep_range(n):
    with pytest.raises(SizeLimitError):
        car.build_rep(n)


def test_vacuum_is_index_zero():
    rep = car.build_rep(3)
    vac = np.zeros(8)
    vac[0] = 1
    for c in rep.annihilators:
        assert not np.any(c @ vac)


def test_exchange_matrix():
    assert np.array_equal(car.exchange_matrix(1), [[0, 1], [1, 0]])
    e = car.exchange_matrix(3)
    assert np.array_equal(e @ e, np.eye(6))
    assert np.array_equal(e, e.T)


@pytest.mark.parametrize("seed", range(5))
def test_exchange_matrix_encodes_linear_car(seed):
    rng = np.random.default_rng(seed)
    n = 2
    rep = car.build_rep(n)
    f = rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n)
    g = rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n)
    fc = sum(fi * op for fi, op in zip(f, rep.ops))
    cg = sum(gi * op for gi, op in zip(g, rep.ops))
    scalar = np.trace(anticomm(fc, cg)) / 2**n
    assert abs(scalar - f @ car.exchange_matrix(n) @ g) < 1e-13
    assert frob_dist(anticomm(fc, cg), scalar * np.eye(2**n)) < 1e-13


def test_tilde_basic():
    rng = np.random.default_rng(0)
    k = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.array_equal(car.tilde(np.eye(4)), np.eye(4))
    assert np.allclose(car.tilde(car.tilde(k)), k, atol=0)
    e = car.exchange_matrix(2)
    assert np.array_equal(car.tilde(e), e)
    with pytest.raises(ShapeError):
        car.tilde(np.eye(3))


def test_quadratic_form_zero():
    rep = car.build_rep(2)
    assert not np.any(car.quadratic_form(np.zeros((4, 4)), rep))


def test_quadratic_form_single_mode_by_hand():
    # c^T k c = b c c^+ - b c^+ c = b (1 - 2 c^+ c)
    rep = car.build_rep(1)
    b = 1.0
    k = np.array([[0, b], [-b, 0]])
    half = 0.5 * car.quadratic_form(k, rep)
    c, cd = rep.ops
    assert frob_dist(half, 0.5 * b * (np.eye(2) - 2 * cd @ c)) < 1e-15
    assert frob_dist(half, np.diag([b / 2, -b / 2])) < 1e-15


def test_quadratic_form_matches_double_sum():
    rng = np.random.default_rng(2)
    rep = car.build_rep(2)
    k = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    brute = sum(k[i, j] * rep.ops[i] @ rep.ops[j] for i in range(4) for j in range(4))
    assert frob_dist(car.quadratic_form(k, rep), brute) < 1e-13


def test_quadratic_form_shape():
    with pytest.raises(ShapeError):
        car.quadratic_form(np.zeros((2, 2)), car.build_rep(2))


@given(st.integers(1, 4), st.integers(0, 2**31))
def test_generator_quadratic_form_hermitian(n, seed):
    gen = car.random_generator(n, seed)
    q = 0.5 * car.quadratic_form(gen.h, car.build_rep(n))
    assert np.max(np.abs(q - q.conj().T)) <= 1e-12


def test_validate_zero():
    assert car.validate_generator(np.zeros((4, 4))).valid


def test_validate_real_phase_generator():
    b = 0.7
    report = car.validate_generator([[0, b], [-b, 0]])
    assert report.antisymmetry_residual == 0
    assert report.tilde_residual == 0
    assert report.valid


def test_validate_rejects_imaginary_hopping():
    # B = i is not Hermitian; E conj(h) E = h instead of -h
    report = car.validate_generator([[0, 1j], [-1j, 0]])
    assert report.antisymmetry_residual == 0
    assert report.tilde_residual == pytest.approx(2.0)
    assert not report.valid


def test_generator_construction_enforces_constraints():
    with pytest.raises(ConstraintError):
        car.QuadraticGenerator(1, np.array([[0, 1j], [-1j, 0]]))
    with pytest.raises(ConstraintError):
        car.QuadraticGenerator(1, np.array([[0, 1], [1, 0]]))


def test_random_generator_zero_scale():
    assert not np.any(car.random_generator(3, 5, scale=0.0).h)


def test_random_generator_deterministic():
    assert car.random_generator(3, 11) == car.random_generator(3, 11)
    assert car.random_generator(3, 11) != car.random_generator(3, 12)


def test_random_generator_sweep():
    passed = sum(car.validate_generator(car.random_generator(3, s).h).valid for s in range(100))
    assert passed == 100


def _blocks(h, n):
    return h[:n, :n], h[:n, n:], h[n:, :n], h[n:, n:]


@given(st.integers(1, 4), st.integers(0, 2**31))
def test_block_characterisation_forward(n, seed):
    # valid => [[A, B], [-B^T, -conj A]], A antisymmetric, B Hermitian
    a, b, c, d = _blocks(car.random_generator(n, seed).h, n)
    assert np.allclose(a, -a.T, atol=1e-14)
    assert np.allclose(b, b.conj().T, atol=1e-14)
    assert np.allclose(c, -b.T, atol=1e-14)
    assert np.allclose(d, -a.conj(), atol=1e-14)


@given(st.integers(1, 3), st.integers(0, 2**31))
def test_block_characterisation_converse(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    good = np.block([[x - x.T, y + y.conj().T], [-(y + y.conj().T).T, -(x - x.T).conj()]])
    assert car.validate_generator(good).valid
    # breaking either block property breaks validity
    bad_b = np.block([[x - x.T, y], [-y.T, -(x - x.T).conj()]])
    bad_a = np.block([[x + x.T, y + y.conj().T], [-(y + y.conj().T).T, -(x + x.T).conj()]])
    assert not car.validate_generator(bad_b).valid
    assert not car.validate_generator(bad_a).valid


def test_generator_serialisation_roundtrip():
    gen = car.random_generator(2, 4)
    again = car.QuadraticGenerator.from_dict(gen.to_dict())
    assert again == gen
    assert set(gen.to_dict()) == {"n", "re", "im"}
