import numpy as np
import pytest
from hypothesis import given, strategies as st

from loopforms import geometry as geo
from loopforms.forms import P1, Form, exterior_derivative
from loopforms.lie import InnerProduct, exp_map, pauli_basis, random_algebra
from loopforms.loops import BundlePairLoop, loop_point, random_field, random_loop

seeds = st.integers(0, 2**32 - 1)
ip = InnerProduct(1.0)
PRESETS = ["zero", "mc", "scaled:0.7"]


def bundle_point(rng, k=1):
    return exp_map(random_algebra(rng, 2, k + 1, scale=2.0))


def test_preset_names():
    assert geo.TrivialConnection("maurer_cartan").preset == "mc"
    assert geo.TrivialConnection("scaled:1.5").alpha == 1.5
    with pytest.raises(ValueError):
        geo.TrivialConnection("bogus")


@pytest.mark.parametrize("preset,flat", [("zero", True), ("mc", True), ("scaled:0.7", False)])
def test_flatness_of_presets(rng, preset, flat):
    tc = geo.TrivialConnection(preset)
    p = bundle_point(rng)
    x, y = random_algebra(rng, 2, (2, 2))
    F = tc.curvature(p, x, y)
    assert (np.max(np.abs(F)) < 1e-14) == flat


@pytest.mark.parametrize("preset", PRESETS)
def test_connection_derivative_matches_finite_differences(rng, preset):
    tc = geo.TrivialConnection(preset)
    e = pauli_basis()[1]
    probe = Form(1, P1, lambda p, x: ip(tc.A(p, x), e), "<A,e>")
    p = bundle_point(rng)
    x, y = random_algebra(rng, 2, (2, 2))
    fd = exterior_derivative(probe, 1e-3, True)(p, x, y)
    assert fd == pytest.approx(ip(tc.dA(p, x, y), e), abs=1e-9)


def test_vertical_part_is_maurer_cartan(rng):
    tc = geo.TrivialConnection()
    p = bundle_point(rng)
    w = random_algebra(rng, 2)
    x = np.stack([np.zeros_like(w), w])
    assert np.allclose(tc.A(p, x), w)


@pytest.mark.parametrize("preset", PRESETS)
def test_looped_curvature_by_finite_differences(preset):
    tc = geo.TrivialConnection(preset)
    p = loop_point(random_loop(1, N=64), random_loop(2, N=64))
    x, y = random_field(3, N=64, lead=2), random_field(4, N=64, lead=2)
    exact = geo.curv_looped(tc)(p, x, y)
    fd = geo.curv_looped_fd(tc)(p, x, y)
    assert np.max(np.abs(exact - fd)) < 1e-8


def test_fusion_form_is_the_x_equals_one_member():
    tc = geo.TrivialConnection()
    p = loop_point(*(random_loop(s, N=64) for s in (1, 2, 3)))
    x = random_field(4, N=64, lead=3)
    assert geo.x_family_1form(tc, 1.0)(p, x) == pytest.approx(geo.fusion_1form(tc)(p, x), abs=1e-14)
    assert geo.x_family_1form(tc, 0.0)(p, x) == pytest.approx(geo.xi_form(tc)(p, x), abs=1e-14)


def test_dxi_sign_of_the_mixed_term():
    # flipping the sign of the omega(delta*theta ^ Ad^-1 A) term must break the identity
    tc = geo.TrivialConnection()
    p = loop_point(*(random_loop(s, N=64) for s in (5, 6, 7)))
    x, y = random_field(8, N=64, lead=3), random_field(9, N=64, lead=3)
    lhs = exterior_derivative(geo.xi_form(tc), 1e-3, True)(p, x, y)
    rhs = geo.dxi_rhs(tc)(p, x, y)
    assert lhs == pytest.approx(rhs, rel=1e-8)
    d, _, _ = geo._delta_loop(p)
    alpha = geo.AlgebraForm(1, geo.LP2, lambda q, v: geo.delta_map().push(q.g, v)[0])
    beta = geo.AlgebraForm(1, geo.LP2, lambda q, v: geo.adjoint_inv(d, tc.A(q.g[[0, 2]], v[[0, 2]])))
    t4 = geo.omega_wedge(alpha, beta, geo.LP2)(p, x, y)
    assert abs(t4) > 1e-3
    assert abs(lhs - (rhs + 2 * t4)) > 1e-3


@given(seeds)
def test_curving_is_antisymmetric(seed):
    tc = geo.TrivialConnection()
    p = loop_point(random_loop(seed, N=32), random_loop(seed + 1, N=32))
    x, y = random_field(seed + 2, N=32, lead=2), random_field(seed + 3, N=32, lead=2)
    b = geo.b_uncorrected_form(tc)
    assert b(p, x, y) == pytest.approx(-b(p, y, x), abs=1e-11)


# --- transport along families ---------------------------------------------------

def pair(seed, N=128):
    return BundlePairLoop(*(random_loop(seed + i, N=N) for i in range(3)))


@pytest.mark.parametrize("kind", ["rotation", "reparam"])
def test_thin_families_are_flat_only_at_x_equal_one(kind):
    tc = geo.TrivialConnection()
    pr = pair(10)
    fam = geo.pt_rotation_family(pr, 128) if kind == "rotation" else geo.pt_reparam_family(pr, S=128)
    rows = geo.pt_integrand_rows(tc, geo.PTConfig(1.0), fam)
    assert np.max(np.abs(rows)) <= 1e-8
    assert np.max(np.abs(geo.pt_integrand_rows(tc, geo.PTConfig(0.0), fam))) > 1e-3


def test_counterexample_matches_oracle(derived):
    from loopforms.suite import fixture_loop
    tc = geo.TrivialConnection()
    m0, g0 = exp_map(random_algebra(np.random.default_rng(3), 2, 2))
    fam = geo.pt_counterexample(fixture_loop(256), m0, g0, 256)
    Y = derived["counterexample"]["Y"]
    values = {x: geo.pt_integral(tc, geo.PTConfig(x), fam) for x in (0.0, 0.5, 1.0, 2.0)}
    assert values[0.0] == pytest.approx(Y / 2, rel=1e-10)
    assert values[1.0] == 0
    for a, b in [(0.0, 0.5), (0.0, 2.0), (0.5, 2.0)]:
        assert values[a] / values[b] == pytest.approx((1 - a) / (1 - b), rel=1e-3)


def test_counterexample_slices_are_positive(derived):
    assert all(y > 0 for y in derived["counterexample"]["y_at_nodes"])


def test_integrand_lookup_requires_grid_point():
    tc = geo.TrivialConnection()
    fam = geo.pt_rotation_family(pair(1, 32), 16)
    assert geo.pt_integrand(tc, geo.PTConfig(), fam, 0.25) == pytest.approx(0, abs=1e-8)
    with pytest.raises(ValueError):
        geo.pt_integrand(tc, geo.PTConfig(), fam, 0.3)


def test_trapezoid_weights_sum_to_one():
    for S in (2, 16, 256):
        w = geo.trapezoid_weights(S)
        assert w.sum() == pytest.approx(1, abs=1e-15)
