import numpy as np
import pytest
from hypothesis import given, strategies as st

from loopforms.errors import ArityMismatch, StepUnderflow
from loopforms.forms import (
    G1, G2, G3, P2, P3,
    Form,
    derivative_terms,
    exterior_derivative,
    face_maps,
    multiplication,
    pr_bundle,
    projection,
    pullback,
    simplicial_delta,
    transgress,
    zero_form,
)
from loopforms.geometry import beta_form, cocycle_omega, omega_theta_theta, rho_form, wz_form, Z_map
from loopforms.lie import InnerProduct, exp_map, pauli_basis, random_algebra
from loopforms.loops import DiscreteLoop, grid, loop_point, random_field, random_loop

seeds = st.integers(0, 2**32 - 1)
ip = InnerProduct(1.0)


def group(rng, k):
    return exp_map(random_algebra(rng, 2, k, scale=2.0))


def vecs(rng, k, m):
    return [random_algebra(rng, 2, k) for _ in range(m)]


def test_wrong_tangent_count_is_a_type_error(rng):
    with pytest.raises(TypeError):
        rho_form(ip)(group(rng, 2), *vecs(rng, 2, 3))


def test_wrong_space_is_rejected(rng):
    with pytest.raises(ArityMismatch):
        rho_form(ip)(group(rng, 3), *vecs(rng, 3, 2))
    with pytest.raises(ArityMismatch):
        beta_form(ip)(group(rng, 1), *vecs(rng, 1, 1))
    with pytest.raises(ArityMismatch):
        rho_form(ip) + wz_form(ip)
    with pytest.raises(ArityMismatch):
        pullback(wz_form(ip), pr_bundle(2, (1,)))


def test_step_below_floor_rejected():
    with pytest.raises(StepUnderflow):
        exterior_derivative(rho_form(ip), h=1e-9)


@given(seeds)
def test_forms_are_alternating(seed):
    rng = np.random.default_rng(seed)
    g, (x, y, z) = group(rng, 1), vecs(rng, 1, 3)
    H = wz_form(ip)
    assert H(g, x, y, z) == pytest.approx(-H(g, y, x, z), abs=1e-12)
    assert H(g, x, y, z) == pytest.approx(H(g, y, z, x), abs=1e-12)


@given(seeds)
def test_wz_form_at_identity_is_the_bracket_pairing(seed):
    rng = np.random.default_rng(seed)
    x, y, z = vecs(rng, 1, 3)
    e = np.eye(2, dtype=complex)[None]
    assert wz_form(ip)(e, x, y, z) == pytest.approx(ip(x[0], y[0] @ z[0] - z[0] @ y[0]), abs=1e-12)


@given(seeds, st.floats(-3, 3))
def test_exterior_derivative_is_linear_and_antisymmetric(seed, c):
    rng = np.random.default_rng(seed)
    g = group(rng, 2)
    x, y, z, w = vecs(rng, 2, 4)
    d = exterior_derivative(rho_form(ip), 1e-3, True)
    base = d(g, x, y, z)
    assert d(g, y, x, z) == pytest.approx(-base, abs=1e-9)
    assert d(g, x + c * w, y, z) == pytest.approx(base + c * d(g, w, y, z), abs=1e-8)


def test_fd_order_two_on_halving(rng):
    # d rho has a closed form: pr1*H + pr2*H - m*H
    g, xs = group(rng, 2), vecs(rng, 2, 3)
    H = wz_form(ip)
    exact = (pullback(H, projection(G2, (0,), G1))(g, *xs) + pullback(H, projection(G2, (1,), G1))(g, *xs)
             - pullback(H, multiplication())(g, *xs))
    errs = [abs(exterior_derivative(rho_form(ip), h)(g, *xs) - exact) for h in (1e-2, 5e-3, 2.5e-3)]
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_d_squared_vanishes(rng):
    g, xs = group(rng, 2), vecs(rng, 2, 4)
    r = rho_form(ip)
    dd = exterior_derivative(exterior_derivative(r, 1e-3, True), 1e-2, True)(g, *xs)
    scale = max(abs(t) for t in derivative_terms(exterior_derivative(r, 1e-3, True), 1e-2, True)(g, *xs))
    assert abs(dd) <= 1e-4 * max(scale, 1.0)


def test_d_squared_vanishes_on_loop_space():
    p = loop_point(random_loop(1, N=64))
    xs = [random_field(s, N=64, lead=1) for s in (2, 3, 4)]
    dd = exterior_derivative(exterior_derivative(beta_form(ip), 1e-3, True), 1e-2, True)(p, *xs)
    assert abs(dd) < 1e-4


@given(seeds)
def test_pullback_commutes_with_d(seed):
    rng = np.random.default_rng(seed)
    g, xs = group(rng, 2), vecs(rng, 2, 3)
    m = multiplication()
    beta = Form(2, G1, lambda q, x, y: ip(q[0] @ x[0] - x[0] @ q[0], y[0]), "b")
    a = exterior_derivative(pullback(beta, m), 1e-3, True)(g, *xs)
    b = pullback(exterior_derivative(beta, 1e-3, True), m)(g, *xs)
    assert a == pytest.approx(b, abs=1e-8)


@pytest.mark.parametrize("arity", [G1, G2, P2])
def test_simplicial_delta_squares_to_zero(rng, arity):
    # a generic 1-form: <θ of the last factor, a fixed vector>
    e = pauli_basis()[0]
    form = Form(1, arity, lambda g, x: ip(x[-1] + g[-1] - np.conj(np.swapaxes(g[-1], -1, -2)), e), "f")
    twice = simplicial_delta(simplicial_delta(form))
    src = twice.arity.factors
    g, (x,) = group(rng, src), vecs(rng, src, 1)
    assert abs(twice(g, x)) < 1e-13


def test_face_counts():
    assert len(face_maps(G2)) == 4
    assert len(face_maps(P2)) == 3
    assert face_maps(P2)[0].src == P3
    assert face_maps(G2)[0].src == G3


def test_zero_form_evaluates_to_zero(rng):
    assert zero_form(2, G2)(group(rng, 2), *vecs(rng, 2, 2)) == 0


def test_transgression_of_exact_fourier_loop(derived):
    # tau(z) = exp(2 pi z E): Z(tau, E), beta_tau(tau E) and omega(sin E, cos E)
    E = pauli_basis()[2]
    N = 64
    z = grid(N)
    tau = DiscreteLoop(exp_map(2 * np.pi * z[:, None, None] * E))
    fx = derived["fourier"]
    assert Z_map(tau, np.broadcast_to(E, (N, 2, 2))) == pytest.approx(fx["Z(exp(2pi z i3), i3)"], rel=1e-12)
    p = loop_point(tau)
    assert beta_form(ip)(p, np.broadcast_to(E, (1, N, 2, 2))) == pytest.approx(
        fx["beta(exp(2pi z i3), tau i3)"], rel=1e-12)
    s, c = np.sin(2 * np.pi * z)[:, None, None] * E, np.cos(2 * np.pi * z)[:, None, None] * E
    assert cocycle_omega(s, c) == pytest.approx(fx["omega(sin E, cos E), E=i3"], rel=1e-12)


@given(seeds)
def test_cocycle_is_antisymmetric(seed):
    x, y = random_field(seed, N=64), random_field(seed + 1, N=64)
    assert cocycle_omega(x, y) + cocycle_omega(y, x) == pytest.approx(0, abs=1e-12)
    p = loop_point(random_loop(seed, N=64))
    assert omega_theta_theta(ip)(p, x[None], y[None]) == pytest.approx(2 * cocycle_omega(x, y), abs=1e-12)


def test_transgression_requires_positive_degree():
    with pytest.raises(ArityMismatch):
        transgress(zero_form(0, G1))
    with pytest.raises(ArityMismatch):
        transgress(beta_form(ip))
