import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermipoisson import car, channels
from fermipoisson.channels import ChannelSet, JumpChannel
from fermipoisson.errors import ConstraintError, SizeLimitError
from fermipoisson.linalg import expm, frob_dist

B = 0.7


def phase_channel(rate=1.0, b=B):
    return JumpChannel(rate, car.QuadraticGenerator(1, np.array([[0, b], [-b, 0]])))


def random_channels(n, seeds, rates=None):
    rates = rates or [1.0] * len(seeds)
    return ChannelSet.of(*(JumpChannel(r, car.random_generator(n, s)) for r, s in zip(rates, seeds)))


def test_one_particle_zero():
    assert np.array_equal(channels.one_particle_matrix(np.zeros((4, 4))), np.eye(4))


def test_one_particle_phase_by_hand():
    # E h = diag(-b, b)
    o = phase_channel().one_particle
    assert frob_dist(o, np.diag([np.exp(1j * B), np.exp(-1j * B)])) < 1e-15


def test_one_particle_rejects_invalid():
    with pytest.raises(ConstraintError):
        channels.one_particle_matrix(np.array([[0, 1j], [-1j, 0]]))


@pytest.mark.parametrize("seed", range(5))
def test_one_particle_preserves_car(seed):
    o = channels.one_particle_matrix(car.random_generator(2, seed))
    e = car.exchange_matrix(2)
    assert frob_dist(o @ e @ o.T, e) <= 1e-10


def test_jump_unitary_zero():
    rep = car.build_rep(2)
    assert np.array_equal(channels.jump_unitary(np.zeros((4, 4)), rep), np.eye(4))


def test_jump_unitary_phase_by_hand():
    u = channels.jump_unitary(phase_channel().gen, car.build_rep(1))
    expected = np.exp(-0.5j * B) * np.diag([1, np.exp(1j * B)])
    assert frob_dist(u, expected) < 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_jump_unitary_is_unitary(seed):
    u = channels.jump_unitary(car.random_generator(3, seed), car.build_rep(3))
    assert frob_dist(u.conj().T @ u, np.eye(8)) <= 1e-10


def test_conjugation_zero_generator():
    ch = JumpChannel(1.0, car.QuadraticGenerator(2, np.zeros((4, 4))))
    assert channels.conjugation_check(ch, car.build_rep(2)) == 0


def test_conjugation_phase_channel():
    assert channels.conjugation_check(phase_channel(), car.build_rep(1)) <= 1e-12


def test_conjugation_sweep():
    for n in (1, 2, 3):
        rep = car.build_rep(n)
        for seed in range(20):
            ch = JumpChannel(1.0, car.random_generator(n, 1000 * n + seed))
            res = channels.channel_residuals(ch, rep)
            assert max(res.values()) <= 1e-10, res


def test_rate_must_be_positive():
    with pytest.raises(ConstraintError):
        phase_channel(rate=0.0)
    with pytest.raises(ConstraintError):
        phase_channel(rate=-1.0)


def test_channel_set_validation():
    with pytest.raises(ConstraintError):
        ChannelSet(1, ())
    with pytest.raises(ValueError):
        ChannelSet(1, (phase_channel(), JumpChannel(1.0, car.random_generator(2, 0))))


def test_lazy_unitary_thread_safe():
    ch = JumpChannel(1.0, car.random_generator(3, 9))
    seen = []
    threads = [threading.Thread(target=lambda: seen.append(ch.unitary)) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(u is seen[0] for u in seen)
    assert np.array_equal(seen[0], channels.jump_unitary(ch.gen, car.build_rep(3)))


def test_moment_generator_zero():
    cs = ChannelSet.of(JumpChannel(2.0, car.QuadraticGenerator(2, np.zeros((4, 4)))))
    for m in (1, 2, 3):
        assert not np.any(channels.moment_generator(cs, m))


def test_moment_generator_first_order():
    ch = JumpChannel(1.5, car.random_generator(2, 3))
    gen = channels.moment_generator(ChannelSet.of(ch), 1)
    assert frob_dist(gen, 1.5 * (ch.one_particle - np.eye(4))) < 1e-15


def test_moment_generator_phase_second_order():
    lam = 1.3
    gen = channels.moment_generator(ChannelSet.of(phase_channel(rate=lam)), 2)
    signs = [1, -1]
    expected = [lam * (np.exp(1j * B * (s1 + s2)) - 1) for s1 in signs for s2 in signs]
    assert frob_dist(gen, np.diag(expected)) < 1e-14


def test_moment_generator_size_cap():
    cs = random_channels(2, [1])
    with pytest.raises(SizeLimitError):
        channels.moment_generator(cs, 12)


def test_partial_generator_full_order():
    cs = random_channels(2, [1, 2], [1.0, 0.5])
    assert np.array_equal(channels.partial_generator(cs, 2, 2), channels.moment_generator(cs, 2))


def test_partial_generator_first_slot():
    ch = JumpChannel(0.8, car.random_generator(1, 4))
    got = channels.partial_generator(ChannelSet.of(ch), 2, 1)
    assert frob_dist(got, np.kron(0.8 * (ch.one_particle - np.eye(2)), np.eye(2))) < 1e-15


def test_partial_generator_range():
    cs = random_channels(1, [0])
    with pytest.raises(ValueError):
        channels.partial_generator(cs, 2, 3)
    with pytest.raises(ValueError):
        channels.partial_generator(cs, 2, 0)


def test_partial_generators_do_not_commute():
    cs = random_channels(2, [5, 6], [1.0, 0.7])
    l21 = channels.partial_generator(cs, 2, 1)
    l22 = channels.partial_generator(cs, 2, 2)
    o1, o2 = (ch.one_particle for ch in cs)
    assert np.linalg.norm(o1 @ o2 - o2 @ o1) > 1e-2
    assert np.linalg.norm(l21 @ l22 - l22 @ l21) > 1e-2


@settings(max_examples=30)
@given(st.integers(0, 2**31), st.floats(0, 2), st.floats(0, 2))
def test_first_order_semigroup(seed, s, t):
    cs = random_channels(2, [seed, seed + 1], [1.0, 0.5])
    gen = channels.moment_generator(cs, 1)
    lhs = expm(gen * (s + t))
    assert frob_dist(lhs, expm(gen * s) @ expm(gen * t)) <= 1e-10


def test_channel_serialisation_roundtrip():
    cs = random_channels(2, [1, 2], [1.0, 0.25])
    again = ChannelSet.from_list(cs.to_list())
    assert [c.rate for c in again] == [1.0, 0.25]
    assert all(a.gen == b.gen for a, b in zip(cs, again))
