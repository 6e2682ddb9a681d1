"""Named forms and maps on G, on the trivial bundle P = M x G (with M = G),
and on their loop spaces.

Loop-space conventions: velocities and tangents are left-trivialized, loop
integrals are periodic trapezoid sums (mean over the N samples), and the
difference map on P^[2] is delta(m, g1, g2) = g2^-1 g1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import (
    G1,
    G2,
    P1,
    P2,
    AlgebraForm,
    Arity,
    Form,
    delta_map,
    exterior_derivative,
    pullback,
    simplicial_delta,
    theta,
    theta_bar,
    transgress,
    wedge_one_two,
    wedge_pair,
    wedge_triple,
)
from .lie import InnerProduct, adjoint, adjoint_inv, bracket
from .loops import (
    BundlePairLoop,
    Cylinder,
    DiscreteLoop,
    LoopPoint,
    constant_cylinder,
    reparam_family,
    rotation_family,
    spectral_derivative,
)

DEFAULT_IP = InnerProduct(1.0)
LG1, LG2 = G1.looped(), G2.looped()
LP1, LP2 = P1.looped(), P2.looped()


# --- forms on G and G^2 --------------------------------------------------------

def wz_form(ip: InnerProduct = DEFAULT_IP) -> Form:
    """H = (1/6) <θ∧[θ∧θ]>; at the identity H(X,Y,Z) = <X,[Y,Z]>."""
    t = theta(G1)
    h = (1.0 / 6.0) * wedge_triple(t, t, t, ip)
    return Form(3, G1, h.evaluator, "H")


def rho_form(ip: InnerProduct = DEFAULT_IP) -> Form:
    """ρ = <pr_1*θ ∧ pr_2*θ̄> on G^2."""
    r = wedge_pair(theta(G2, 0), theta_bar(G2, 1), ip)
    return Form(2, G2, r.evaluator, "ρ")


# --- loop-algebra maps ---------------------------------------------------------

def _mean(a):
    return np.mean(a, axis=-1)


def z_pairing(g, u, x, ip: InnerProduct = DEFAULT_IP):
    """Z(τ, X) = 2 ∫ <∂_z τ τ^-1, X> for samples g, left velocity u."""
    return 2 * _mean(ip(adjoint(g, u), x))


def Z_map(tau: DiscreteLoop, x: np.ndarray, ip: InnerProduct = DEFAULT_IP) -> float:
    return z_pairing(tau.samples, tau.velocity, x, ip)


def cocycle_omega(x: np.ndarray, y: np.ndarray, ip: InnerProduct = DEFAULT_IP):
    """ω(X, Y) = 2 ∫ <X, ∂_z Y>."""
    return 2 * _mean(ip(x, spectral_derivative(y)))


def epsilon_nu(ip: InnerProduct = DEFAULT_IP) -> Form:
    """ε(X1, X2) = ∫ <τ1^-1 ∂τ1, X2 τ2^-1> - <τ1^-1 X1, ∂τ2 τ2^-1>."""

    def ev(p: LoopPoint, x):
        g2 = p.g[1]
        return _mean(ip(p.u[0], adjoint(g2, x[1])) - ip(x[0], adjoint(g2, p.u[1])))

    return Form(1, LG2, ev, "ε")


def beta_form(ip: InnerProduct = DEFAULT_IP) -> Form:
    """β_τ(X) = ∫ <τ^-1 ∂τ, τ^-1 X>."""
    return Form(1, LG1, lambda p, x: _mean(ip(p.u[0], x[0])), "β")


def omega_theta_theta(ip: InnerProduct = DEFAULT_IP) -> Form:
    """The 2-form ω(θ∧θ) on LG."""

    def ev(p, x, y):
        return cocycle_omega(x[0], y[0], ip) - cocycle_omega(y[0], x[0], ip)

    return Form(2, LG1, ev, "ω(θ∧θ)")


def curv_nu(ip: InnerProduct = DEFAULT_IP) -> Form:
    """Curvature of the central-extension connection, -τ(H)."""
    return -transgress(wz_form(ip))


# --- connections on the trivial bundle -----------------------------------------

@dataclass(frozen=True)
class TrivialConnection:
    """A = Ad_{g^-1} a_m(v) + θ_g(w) on M x G with a = f(m) θ_M.

    Presets: "zero" (f = 0, flat), "mc" (f = 1, flat),
    "scaled:α" (f(m) = α (1 + Re tr(m) / 2n), not flat).
    """

    preset: str = "scaled:0.7"

    def __post_init__(self):
        name = self.preset
        if name == "maurer_cartan":
            object.__setattr__(self, "preset", "mc")
        elif not (name in ("zero", "mc") or name.startswith("scaled:")):
            raise ValueError(f"unknown connection preset {name!r}")
        if self.preset.startswith("scaled:"):
            float(self.preset.split(":", 1)[1])

    @property
    def alpha(self) -> float:
        return float(self.preset.split(":", 1)[1]) if self.preset.startswith("scaled:") else 0.0

    def f(self, m):
        if self.preset == "zero":
            return np.zeros(m.shape[:-2])
        if self.preset == "mc":
            return np.ones(m.shape[:-2])
        n = m.shape[-1]
        return self.alpha * (1 + np.trace(m, axis1=-2, axis2=-1).real / (2 * n))

    def df(self, m, v):
        """Derivative of f along the tangent m v."""
        if self.preset in ("zero", "mc"):
            return np.zeros(m.shape[:-2])
        n = m.shape[-1]
        return self.alpha * np.trace(m @ v, axis1=-2, axis2=-1).real / (2 * n)

    def a(self, m, v):
        return self.f(m)[..., None, None] * v

    def base_curvature(self, m, v1, v2):
        """F_a = da + [a∧a]/2 on tangents m v1, m v2."""
        f = self.f(m)[..., None, None]
        return (self.df(m, v1)[..., None, None] * v2 - self.df(m, v2)[..., None, None] * v1
                + (f * f - f) * bracket(v1, v2))

    def A(self, p, x):
        """Connection at points p = (m, g), tangents x = (v, w)."""
        return adjoint_inv(p[1], self.a(p[0], x[0])) + x[1]

    def curvature(self, p, x, y):
        return adjoint_inv(p[1], self.base_curvature(p[0], x[0], y[0]))

    def dA(self, p, x, y):
        """dA = F - [A∧A]/2 evaluated pointwise."""
        return self.curvature(p, x, y) - bracket(self.A(p, x), self.A(p, y))

    def form(self) -> AlgebraForm:
        return AlgebraForm(1, P1, self.A, "A")

    def d_form(self) -> AlgebraForm:
        return AlgebraForm(2, P1, self.dA, "dA")

    def slot(self, k: int, i: int) -> AlgebraForm:
        """pr_i* A on P^[k]."""
        ar = Arity("P", k)
        return AlgebraForm(1, ar, lambda p, x: self.A(p[[0, i]], x[[0, i]]), f"pr{i}*A")


def looped_connection(tc: TrivialConnection) -> AlgebraForm:
    """Ā_τ(X)(z) = A_{τ(z)}(X(z)) on LP."""
    return AlgebraForm(1, LP1, lambda p, x: tc.A(p.g, x), "Ā")


def reduction_r(tc: TrivialConnection, p: LoopPoint, x: np.ndarray, ip: InnerProduct = DEFAULT_IP):
    """r(τ, X) = -2 ∫ <A(∂_z τ), X> for a loop τ in P."""
    return -2 * _mean(ip(tc.A(p.g, p.u), x))


def curv_looped(tc: TrivialConnection) -> AlgebraForm:
    """curv(Ā) as the pointwise looping of the curvature of A."""
    return AlgebraForm(2, LP1, lambda p, x, y: tc.curvature(p.g, x, y), "curv(Ā)")


def curv_looped_fd(tc: TrivialConnection, h: float = 1e-3, richardson: bool = True) -> AlgebraForm:
    """curv(Ā) = dĀ + [Ā∧Ā]/2 with dĀ by loop-space finite differences."""
    abar = Form(1, LP1, lambda p, x: tc.A(p.g, x), "Ā")
    dabar = exterior_derivative(abar, h, richardson)

    def fn(p, x, y):
        return dabar.evaluator(p, x, y) + bracket(tc.A(p.g, x), tc.A(p.g, y))

    return AlgebraForm(2, LP1, fn, "curv(Ā)_fd")


def zeta_form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """ζ_τ(X) = r(τ, Ā_τ(X))."""
    return Form(1, LP1, lambda p, x: reduction_r(tc, p, tc.A(p.g, x), ip), "ζ")


def _delta_loop(p: LoopPoint, *x):
    """Difference loop of a loop in P^[2] and pushed tangents (left-trivialized)."""
    dm = delta_map()
    return dm.apply(p.g)[0], dm.push(p.g, p.u)[0], [dm.push(p.g, xi)[0] for xi in x]


def connection_shift_form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """Z(Lδ, pr_2*Ā) on LP^[2]."""

    def ev(p, x):
        d, ud, _ = _delta_loop(p)
        return z_pairing(d, ud, tc.A(p.g[[0, 2]], x[[0, 2]]), ip)

    return Form(1, LP2, ev, "Z(Lδ,pr2*Ā)")


def xi_form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """ξ = Lδ*β + Z(Lδ, pr_2*Ā)."""
    return Form(1, LP2, (pullback(beta_form(ip), delta_map()) + connection_shift_form(tc, ip)).evaluator, "ξ")


def fusion_1form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """ξ - Δζ/2 on LP^[2]."""
    f = xi_form(tc, ip) - 0.5 * simplicial_delta(zeta_form(tc, ip))
    return Form(1, LP2, f.evaluator, "ξ-Δζ/2")


def x_family_1form(tc: TrivialConnection, x: float, ip: InnerProduct = DEFAULT_IP) -> Form:
    """Lδ*β + Z(Lδ, pr_2*Ā) - (x/2) Δζ; x = 0 is the unshifted one, x = 1 the fusion form."""
    f = xi_form(tc, ip) - (0.5 * x) * simplicial_delta(zeta_form(tc, ip))
    return Form(1, LP2, f.evaluator, f"χ_{x}")


# --- Chern-Simons data -----------------------------------------------------------

def cs_form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """CS(A) = <A∧dA> + (1/3) <A∧[A∧A]> on P."""
    a = tc.form()
    f = wedge_one_two(a, tc.d_form(), ip) + (1.0 / 3.0) * wedge_triple(a, a, a, ip)
    return Form(3, P1, f.evaluator, "CS(A)")


def delta_theta() -> AlgebraForm:
    """δ*θ on P^[2]: left-trivialized variation of g2^-1 g1."""

    def fn(p, x):
        return x[1] - adjoint(np.conj(np.swapaxes(p[1], -1, -2)) @ p[2], x[2])

    return AlgebraForm(1, P2, fn, "δ*θ")


def cs_omega_form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """ω = <δ*θ ∧ pr_1*A> on P^[2]."""
    f = wedge_pair(delta_theta(), tc.slot(2, 1), ip)
    return Form(2, P2, f.evaluator, "ω_CS")


# --- curvings ----------------------------------------------------------------------

def omega_wedge(alpha: AlgebraForm, beta: AlgebraForm, arity: Arity, ip: InnerProduct = DEFAULT_IP, name=""):
    """ω(α∧β)(X,Y) = ω(α(X), β(Y)) - ω(α(Y), β(X)) for loop-algebra-valued 1-forms."""

    def ev(p, x, y):
        return cocycle_omega(alpha(p, x), beta(p, y), ip) - cocycle_omega(alpha(p, y), beta(p, x), ip)

    return Form(2, arity, ev, name or f"ω({alpha.name}∧{beta.name})")


def b_uncorrected_form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """ω(Ā∧Ā)/2 + r(curv(Ā))."""
    abar = looped_connection(tc)
    half = 0.5 * omega_wedge(abar, abar, LP1, ip)
    rc = Form(2, LP1, lambda p, x, y: reduction_r(tc, p, tc.curvature(p.g, x, y), ip), "r(curv Ā)")
    return half + rc


def b_corr_form(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP, h: float = 1e-3,
                richardson: bool = True) -> Form:
    """B = ω(Ā∧Ā)/2 + r(curv(Ā)) - dζ/2 on LP."""
    f = b_uncorrected_form(tc, ip) - 0.5 * exterior_derivative(zeta_form(tc, ip), h, richardson)
    return Form(2, LP1, f.evaluator, "B_corr")


def chi_corr_curvature(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP, h: float = 1e-3,
                       richardson: bool = True) -> Form:
    """-Lδ*τ(H) + d(ξ - Δζ/2) on LP^[2]."""
    th = transgress(pullback(wz_form(ip), delta_map()))
    f = exterior_derivative(fusion_1form(tc, ip), h, richardson) - th
    return Form(2, LP2, f.evaluator, "curv(χ_corr)")


def dxi_rhs(tc: TrivialConnection, ip: InnerProduct = DEFAULT_IP) -> Form:
    """-Lδ*ω(θ∧θ)/2 - Lδ*curv(ν) + Z(Lδ, pr_2*dĀ) - ω(Lδ*θ ∧ Ad_{Lδ}^-1 pr_2*Ā).

    The last sign follows from dZ(γ, α) = Z(γ, dα) - ω(γ*θ ∧ Ad_γ^-1 α).
    """
    dm = delta_map()
    t1 = -0.5 * pullback(omega_theta_theta(ip), dm)
    t2 = transgress(pullback(wz_form(ip), dm))

    def t3(p, x, y):
        d, ud, _ = _delta_loop(p)
        return z_pairing(d, ud, tc.dA(p.g[[0, 2]], x[[0, 2]], y[[0, 2]]), ip)

    alpha = AlgebraForm(1, LP2, lambda p, x: dm.push(p.g, x)[0], "Lδ*θ")
    beta = AlgebraForm(1, LP2, lambda p, x: adjoint_inv(dm.apply(p.g)[0], tc.A(p.g[[0, 2]], x[[0, 2]])), "Ad⁻¹Ā")
    t4 = omega_wedge(alpha, beta, LP2, ip)
    f = t1 + t2 + Form(2, LP2, t3, "Z(Lδ,dĀ)") - t4
    return Form(2, LP2, f.evaluator, "dξ rhs")


# --- parallel transport along families in LP^[2] ------------------------------------

@dataclass(frozen=True)
class PTConfig:
    x: float = 1.0


@dataclass(frozen=True, eq=False)
class PTFamily:
    """A path t -> (m, g1, g2)(t) of loops in P^[2], one Cylinder per factor."""

    m: Cylinder
    g1: Cylinder
    g2: Cylinder

    @property
    def S(self) -> int:
        return self.m.S

    def arrays(self):
        g = np.stack([self.m.samples, self.g1.samples, self.g2.samples])
        return g, np.stack([self.m.dz, self.g1.dz, self.g2.dz]), np.stack([self.m.ds, self.g1.ds, self.g2.ds])


def pt_terms(tc: TrivialConnection, fam: PTFamily, ip: InnerProduct = DEFAULT_IP):
    """Per-row values (Z(δ, ∂_tδ δ^-1), Z(δ, Ā(∂_t γ2)), r(γ2, ∂_tδ δ^-1))."""
    g, uz, us = fam.arrays()
    dm = delta_map()
    d = dm.apply(g)[0]
    dz, dt = dm.push(g, uz)[0], dm.push(g, us)[0]
    right_t = adjoint(d, dt)
    z1 = z_pairing(d, dz, right_t, ip)
    z2 = z_pairing(d, dz, tc.A(g[[0, 2]], us[[0, 2]]), ip)
    r = -2 * _mean(ip(tc.A(g[[0, 2]], uz[[0, 2]]), right_t))
    return z1, z2, r


def pt_integrand_rows(tc: TrivialConnection, cfg: PTConfig, fam: PTFamily, ip: InnerProduct = DEFAULT_IP):
    x = cfg.x
    z1, z2, r = pt_terms(tc, fam, ip)
    return (1 - x) / 2 * z1 + (2 - x) / 2 * z2 + x / 2 * r


def pt_integrand(tc: TrivialConnection, cfg: PTConfig, fam: PTFamily, t: float, ip: InnerProduct = DEFAULT_IP) -> float:
    """Integrand of the horizontal-lift integral at the family row t (t*S integral)."""
    i = int(round(t * fam.S))
    if abs(i - t * fam.S) > 1e-9:
        raise ValueError("t must lie on the family grid")
    return float(pt_integrand_rows(tc, cfg, fam, ip)[i])


def trapezoid_weights(S: int) -> np.ndarray:
    w = np.full(S + 1, 1.0 / S)
    w[0] = w[-1] = 0.5 / S
    return w


def pt_integral(tc: TrivialConnection, cfg: PTConfig, fam: PTFamily, ip: InnerProduct = DEFAULT_IP) -> float:
    return float(trapezoid_weights(fam.S) @ pt_integrand_rows(tc, cfg, fam, ip))


def pt_rotation_family(pair: BundlePairLoop, S: int = 256) -> PTFamily:
    """All three factors rotated together: a thin family."""
    return PTFamily(*(rotation_family(l, S) for l in (pair.base, pair.g1, pair.g2)))


def pt_reparam_family(pair: BundlePairLoop, schedule=None, S: int = 256) -> PTFamily:
    """All three factors reparameterized by one warp schedule: a thin family."""
    return PTFamily(*(reparam_family(l, schedule, S) for l in (pair.base, pair.g1, pair.g2)))


def pt_counterexample(tau: DiscreteLoop, m0: np.ndarray, g0: np.ndarray, S: int = 256) -> PTFamily:
    """γ2 constant at (m0, g0) and γ1 = γ2 δ with δ(t)(z) = τ(z + t)."""
    rot = rotation_family(tau, S)
    m = constant_cylinder(m0, tau.N, S)
    g2 = constant_cylinder(g0, tau.N, S)
    g1 = Cylinder(g0 @ rot.samples, rot.ds, rot.dz)
    return PTFamily(m, g1, g2)
