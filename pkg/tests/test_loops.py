import numpy as np
import pytest
from hypothesis import given, strategies as st

from loopforms.errors import BandLimitError, DegenerateInput, EndpointMismatch, GridError, PlateauViolation
from loopforms.lie import dagger, exp_map, pauli_basis, random_algebra
from loopforms.loops import (
    DiscreteLoop,
    constant_loop,
    from_json,
    grid,
    left_log_derivative,
    loop_join,
    path_field,
    random_field,
    random_loop,
    random_path,
    reparam_family,
    rotating_warp_schedule,
    rotate_loop,
    rotation_family,
    spectral_derivative,
    tangent_join,
    thinness_defect,
    to_json,
)

seeds = st.integers(0, 2**32 - 1)
E = pauli_basis()[2]


def circle(N):
    z = grid(N)[:, None, None]
    return exp_map(2 * np.pi * z * E)


@pytest.mark.parametrize("method,tol", [("spectral", 1e-12), ("log-quotient", 1e-3), ("fd4", 1e-5)])
def test_velocity_of_one_parameter_subgroup(method, tol):
    u = left_log_derivative(circle(256), method)
    assert np.max(np.abs(u - 2 * np.pi * E)) < tol


@given(seeds)
def test_generator_velocity_agrees_with_spectral(seed):
    tau = random_loop(seed, N=128)
    assert np.max(np.abs(tau.velocity - left_log_derivative(tau.samples))) < 1e-10


def test_spectral_derivative_of_band_limited_field():
    z = grid(64)
    f = np.sin(2 * np.pi * 3 * z) + np.cos(2 * np.pi * 5 * z)
    df = 2 * np.pi * (3 * np.cos(2 * np.pi * 3 * z) - 5 * np.sin(2 * np.pi * 5 * z))
    assert np.allclose(spectral_derivative(f, axis=0), df, atol=1e-11)


@pytest.mark.parametrize("K", [1, 4, 8, 16])
def test_trapezoid_exact_on_band_limited_integrands(K):
    # integrand of degree K on N >= 4K points: the periodic rule is exact
    rng = np.random.default_rng(K)
    c, s = rng.standard_normal(K + 1), rng.standard_normal(K + 1)
    for N in (4 * K, 8 * K):
        z = grid(N)
        f = sum(c[k] * np.cos(2 * np.pi * k * z) + s[k] * np.sin(2 * np.pi * k * z) for k in range(K + 1))
        assert abs(f.mean() - c[0]) < 1e-12


def test_odd_sample_count_rejected():
    with pytest.raises(ValueError):
        DiscreteLoop(circle(32)[:31])


def test_band_limit_enforced():
    with pytest.raises(BandLimitError):
        random_loop(0, modes=20, N=64)
    with pytest.raises(BandLimitError):
        random_field(0, N=64, modes=17)


def test_rough_loop_is_flagged():
    rng = np.random.default_rng(0)
    rough = DiscreteLoop(exp_map(random_algebra(rng, 2, 16, scale=3.0)))
    assert not rough.is_smooth()
    with pytest.raises(DegenerateInput):
        rough.require_smooth()


def test_default_loops_are_smooth():
    assert all(random_loop(s).is_smooth() for s in range(20))


@given(seeds, st.integers(0, 63))
def test_grid_rotation_is_a_roll(seed, shift):
    tau = random_loop(seed, N=64)
    rolled = DiscreteLoop(tau.samples, tau.velocity)
    r = rotate_loop(rolled, shift / 64, resample=False)
    assert np.array_equal(r.samples, np.roll(tau.samples, -shift, axis=0))


def test_off_grid_rotation_needs_resampling():
    tau = random_loop(1, N=64)
    plain = DiscreteLoop(tau.samples, tau.velocity)
    with pytest.raises(GridError):
        rotate_loop(plain, 0.3 / 64, resample=False)
    r = rotate_loop(tau, 0.3 / 64)
    g, _ = tau.generator(grid(64) + 0.3 / 64)
    assert np.allclose(r.samples, g, atol=1e-13)


def test_spectral_interpolant_reproduces_band_limited_loop():
    tau = random_loop(3, N=128)
    plain = DiscreteLoop(tau.samples)
    z = np.array([0.1234, 0.5, 0.987])
    g, u = plain.evaluator()(z)
    g0, u0 = tau.generator(z)
    assert np.allclose(g, g0, atol=1e-8)
    assert np.allclose(u, u0, atol=1e-6)


def test_thin_families_have_small_defect():
    tau = random_loop(4)
    assert thinness_defect(rotation_family(tau, 256)) < 1e-10
    assert thinness_defect(reparam_family(tau, S=256)) < 5e-3
    assert thinness_defect(reparam_family(tau, rotating_warp_schedule(), S=256)) < 5e-3


def test_constant_loop_has_zero_velocity():
    c = constant_loop(exp_map(E), 32)
    assert np.all(c.velocity == 0)


def test_paths_sit_at_their_ends():
    p = random_path(5, N=128)
    assert np.all(p.samples[: p.plateau] == p.samples[0])
    assert np.all(p.samples[-p.plateau:] == p.samples[-1])
    assert np.all(p.velocity[: p.plateau] == 0)


def test_path_velocity_matches_differences():
    p = random_path(6, N=2048, plateau=16)
    fd = dagger(p.samples[1:-1]) @ (p.samples[2:] - p.samples[:-2]) * (p.N / 2)
    assert np.max(np.abs(fd - p.velocity[1:-1])) < 1e-4


def test_join_requires_common_endpoints():
    a, b = random_path(1, N=64), random_path(2, N=64)
    with pytest.raises(EndpointMismatch):
        loop_join(a, b)


def test_join_of_paths_is_a_smooth_loop():
    start = exp_map(E)
    shift = 0.4 * pauli_basis()[0]
    a = random_path(1, N=256, start=start, end_shift=shift)
    b = random_path(2, N=256, start=start, end_shift=shift)
    loop = loop_join(a, b)
    assert loop.N == 256
    assert loop.is_smooth()
    assert np.max(np.abs(loop.velocity - left_log_derivative(loop.samples, "fd4"))) < 1e-2


def test_tangent_join_rejects_fields_moving_on_plateaus():
    p = random_path(1, N=64)
    x = path_field(2, p)
    assert tangent_join(x, x, p.plateau).shape == (64, 2, 2)
    with pytest.raises(PlateauViolation):
        tangent_join(x + 1e-6 * E, x, p.plateau)


@pytest.mark.parametrize("obj", [random_loop(9, N=32), random_path(9, N=32)])
def test_json_round_trip(obj):
    back = from_json(to_json(obj))
    assert type(back) is type(obj)
    assert np.array_equal(back.samples, obj.samples)
    assert np.array_equal(back.velocity, obj.velocity)
