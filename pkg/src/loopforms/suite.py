"""Registry of identity checks with relative residuals and tolerance classes.

Each check draws `trials` randomized inputs. The seed for each trial comes
from (master seed, check index, trial index), so results do not depend on
scheduling or worker count.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from typing import Callable

import numpy as np

from . import geometry as geo
from .errors import DegenerateInput, UnknownCheck
from .forms import (
    G1, G2,
    derivative_terms,
    delta2_map,
    delta_map,
    exterior_derivative,
    face_maps,
    multiplication,
    projection,
    pr_bundle,
    pullback,
    transgress,
)
from .lie import InnerProduct, adjoint, adjoint_inv, bracket, exp_map, random_algebra
from .loops import (
    BundlePairLoop,
    DiscreteLoop,
    FourierGenerator,
    LoopPoint,
    loop_from_generator,
    loop_join,
    loop_point,
    path_field,
    random_field,
    random_loop,
    random_path,
    rotating_warp_schedule,
    tangent_join,
    thinness_defect,
    warp_schedule,
)

TOLERANCES = {"QUAD": 1e-9, "FD": 1e-6, "FD2": 1e-4}
MAX_SKIP_FRACTION = 0.05
MIN_FD_SAMPLES = 64


@dataclass(frozen=True)
class RunConfig:
    group: str = "su2"
    N: int = 256
    S: int = 256
    h: float = 1e-3
    seed: int = 0
    level: float = 1.0
    connection: str = "scaled:0.7"
    trials: int = 32
    richardson: bool = True
    modes: int = 4
    amplitude: float = 0.5
    x: float | None = None  # transport parameter; None means the check's own default
    checks: tuple = ()
    report: str = "json"
    output: str | None = None

    def __post_init__(self):
        if self.N % 2 or self.N < 2:
            raise ValueError(f"N must be a positive even integer, got {self.N}")
        if self.S < 2:
            raise ValueError("S must be at least 2")
        if not 1e-6 <= self.h <= 1e-1:
            raise ValueError(f"h must lie in [1e-6, 1e-1], got {self.h}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.report not in ("json", "md"):
            raise ValueError(f"unknown report format {self.report!r}")
        InnerProduct(self.level)
        geo.TrivialConnection(self.connection)
        _ = self.n

    @property
    def n(self) -> int:
        g = self.group.lower().replace("(", "").replace(")", "")
        if not g.startswith("su") or not g[2:].isdigit() or int(g[2:]) < 2:
            raise ValueError(f"unknown group {self.group!r}")
        return int(g[2:])

    def echo(self) -> dict:
        keys = ("group", "N", "S", "h", "seed", "level", "connection", "trials", "richardson", "modes", "amplitude")
        return {k: getattr(self, k) for k in keys}


@dataclass(frozen=True)
class Sample:
    """One evaluated identity: sum(lhs) = sum(rhs); `scale` overrides the terms used for the median."""

    lhs: list
    rhs: list
    scale: list | None = None
    info: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CheckSpec:
    name: str
    anchor: str
    tolerance_class: str
    runner: Callable
    recipe: str = ""
    x_default: float | None = None


@dataclass
class CheckResult:
    name: str
    paper_anchor: str
    tolerance_class: str
    trials: int
    skipped: int
    max_rel_residual: float
    tolerance: float
    passed: bool
    config: dict
    thinness_defect: float | None = None
    under_resolved: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if d["thinness_defect"] is None:
            del d["thinness_defect"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckResult":
        d = dict(d)
        d["passed"] = d.pop("pass")
        return cls(**d)


def relative_residual(lhs, rhs, scale_terms=None) -> float:
    """|L - R| / (median |term| + |L| + |R|), with 0/0 read as 0."""
    lhs_v, rhs_v = float(np.sum(lhs)), float(np.sum(rhs))
    terms = list(lhs) + list(rhs) if scale_terms is None else list(scale_terms)
    scale = float(np.median(np.abs(np.asarray(terms, float)))) if terms else 0.0
    denom = scale + abs(lhs_v) + abs(rhs_v)
    diff = abs(lhs_v - rhs_v)
    return 0.0 if denom == 0 else diff / denom


# --- per-trial input generation ------------------------------------------------

class Trial:
    """Random inputs for one trial, all derived from a single SeedSequence."""

    def __init__(self, cfg: RunConfig, seq: np.random.SeedSequence, x: float | None, index: int = 0):
        self.cfg = cfg
        self.index = index
        self.rng = np.random.default_rng(seq)
        self.ip = InnerProduct(cfg.level)
        self.tc = geo.TrivialConnection(cfg.connection)
        self.n = cfg.n
        self.x = x

    def seed(self) -> int:
        return int(self.rng.integers(2**63))

    def group(self, k: int) -> np.ndarray:
        return exp_map(random_algebra(self.rng, self.n, k, scale=2.0))

    def vectors(self, k: int) -> np.ndarray:
        return random_algebra(self.rng, self.n, k)

    def loop(self) -> DiscreteLoop:
        c = self.cfg
        return random_loop(self.seed(), c.modes, c.amplitude, c.N, self.n).require_smooth()

    def point(self, k: int) -> LoopPoint:
        return loop_point(*(self.loop() for _ in range(k)))

    def field(self, k: int | None = None) -> np.ndarray:
        c = self.cfg
        lead = () if k is None else k
        return random_field(self.seed(), c.N, c.modes, 1.0, self.n, lead)


def _signed_faces(form, point, *x) -> list:
    return [(-1) ** i * pullback(form, f)(point, *x) for i, f in enumerate(face_maps(form.arity))]


# --- the checks -----------------------------------------------------------------

def _c1(t: Trial):
    H, rho = geo.wz_form(t.ip), geo.rho_form(t.ip)
    g, x = t.group(2), [t.vectors(2) for _ in range(3)]
    p1 = pullback(H, projection(G2, (0,), G1))(g, *x)
    p2 = pullback(H, projection(G2, (1,), G1))(g, *x)
    m = pullback(H, multiplication())(g, *x)
    d = exterior_derivative(rho, t.cfg.h, t.cfg.richardson)(g, *x)
    return Sample([p1, p2], [m, d])


def _c2(t: Trial):
    g, x = t.group(3), [t.vectors(3) for _ in range(2)]
    return Sample(_signed_faces(geo.rho_form(t.ip), g, *x), [])


def _c3(t: Trial):
    """On SU(2) each partial vanishes by itself, so the scale comes from H on the omitted triples."""
    H = geo.wz_form(t.ip)
    g, x = t.group(1), [t.vectors(1) for _ in range(4)]
    parts = derivative_terms(H, t.cfg.h, t.cfg.richardson)(g, *x)
    values = [H(g, *(x[:i] + x[i + 1:])) for i in range(4)]
    return Sample(parts, [], values)


def _c4(t: Trial):
    p, x = t.point(2), t.field(2)
    return Sample([geo.epsilon_nu(t.ip)(p, x)], [transgress(geo.rho_form(t.ip))(p, x)])


def _c5a(t: Trial):
    tau, x, y = t.loop(), t.field(), t.field()
    g = tau.samples
    lhs = geo.cocycle_omega(adjoint_inv(g, x), adjoint_inv(g, y), t.ip)
    rhs = [geo.cocycle_omega(x, y, t.ip), geo.Z_map(tau, bracket(x, y), t.ip)]
    return Sample([lhs], rhs)


def _c5b(t: Trial):
    p, gam, x = t.point(2), t.loop(), t.field()
    g = gam.samples
    pg = LoopPoint(np.stack([p.g[0], p.g[1] @ g]), np.stack([p.u[0], adjoint_inv(g, p.u[1]) + gam.velocity]))
    lhs = geo.reduction_r(t.tc, pg, adjoint_inv(g, x), t.ip)
    rhs = [geo.reduction_r(t.tc, p, x, t.ip), -geo.Z_map(gam, x, t.ip)]
    return Sample([lhs], rhs)


def _c5(t: Trial):
    return [_c5a(t), _c5b(t)]


def _c6(t: Trial):
    p, x, y = t.point(1), t.field(1), t.field(1)
    lhs = -0.5 * geo.omega_theta_theta(t.ip)(p, x, y)
    rhs = [-transgress(geo.wz_form(t.ip))(p, x, y),
           exterior_derivative(geo.beta_form(t.ip), t.cfg.h, t.cfg.richardson)(p, x, y)]
    return Sample([lhs], rhs)


def _c7(t: Trial):
    p, x = t.point(3), t.field(3)
    lhs = _signed_faces(geo.zeta_form(t.tc, t.ip), p, x)
    d, ud, (yd,) = geo._delta_loop(p, x)
    right = adjoint(d, yd)
    tau2 = LoopPoint(p.g[[0, 2]], p.u[[0, 2]])
    rhs = [-geo.reduction_r(t.tc, tau2, right, t.ip),
           geo.z_pairing(d, ud, t.tc.A(p.g[[0, 2]], x[[0, 2]]), t.ip),
           geo.z_pairing(d, ud, right, t.ip)]
    return Sample(lhs, rhs)


def _c8(t: Trial):
    p, x = t.point(4), t.field(4)
    lhs = _signed_faces(geo.xi_form(t.tc, t.ip), p, x)
    rhs = [-pullback(geo.epsilon_nu(t.ip), delta2_map())(p, x)]
    return Sample(lhs, rhs)


def _c9(t: Trial):
    p, x, y = t.point(3), t.field(3), t.field(3)
    lhs = exterior_derivative(geo.xi_form(t.tc, t.ip), t.cfg.h, t.cfg.richardson)(p, x, y)
    return Sample([lhs], [geo.dxi_rhs(t.tc, t.ip)(p, x, y)])


def _c10(t: Trial):
    p, x, y = t.point(3), t.field(3), t.field(3)
    b = geo.b_corr_form(t.tc, t.ip, t.cfg.h, t.cfg.richardson)
    rhs = geo.chi_corr_curvature(t.tc, t.ip, t.cfg.h, t.cfg.richardson)(p, x, y)
    return Sample(_signed_faces(b, p, x, y), [rhs])


def _c11(t: Trial):
    p, x = t.point(3), t.field(3)
    return Sample([geo.fusion_1form(t.tc, t.ip)(p, x)], [transgress(geo.cs_omega_form(t.tc, t.ip))(p, x)])


def _c12(t: Trial):
    g, z = t.group(3), [t.vectors(3) for _ in range(3)]
    cs = geo.cs_form(t.tc, t.ip)
    lhs = [pullback(cs, pr_bundle(2, (2,)))(g, *z), -pullback(cs, pr_bundle(2, (1,)))(g, *z)]
    d_om = exterior_derivative(geo.cs_omega_form(t.tc, t.ip), t.cfg.h, t.cfg.richardson)(g, *z)
    return Sample(lhs, [pullback(geo.wz_form(t.ip), delta_map())(g, *z), d_om])


def _c13(t: Trial):
    g, w = t.group(4), [t.vectors(4) for _ in range(2)]
    om = geo.cs_omega_form(t.tc, t.ip)
    lhs = pullback(om, pr_bundle(3, (1, 3)))(g, *w)
    rhs = [pullback(geo.rho_form(t.ip), delta2_map())(g, *w),
           pullback(om, pr_bundle(3, (1, 2)))(g, *w),
           pullback(om, pr_bundle(3, (2, 3)))(g, *w)]
    return Sample([lhs], rhs)


def _c14(t: Trial):
    p, x, y = t.point(2), t.field(2), t.field(2)
    b = geo.b_corr_form(t.tc, t.ip, t.cfg.h, t.cfg.richardson)(p, x, y)
    return Sample([b], [-transgress(geo.cs_form(t.tc, t.ip))(p, x, y)])


def _c15(t: Trial):
    """Three paths in P^[2] with common endpoints; the fusion form is additive
    on the joined loops."""
    c = t.cfg
    starts, shifts = t.group(3), t.vectors(3) * c.amplitude
    paths = [[random_path(t.seed(), c.modes, c.amplitude, None, c.N, t.n, starts[j], shifts[j]) for j in range(3)]
             for _ in range(3)]
    fields = [path_field(t.seed(), ps[0], c.modes, 1.0, lead=3) for ps in paths]
    plateau = paths[0][0].plateau
    lam = geo.fusion_1form(t.tc, t.ip)

    def joined(a, b):
        loops = [loop_join(paths[a][j], paths[b][j]) for j in range(3)]
        for lp in loops:
            lp.require_smooth()
        return lam(loop_point(*loops), tangent_join(fields[a], fields[b], plateau))

    return Sample([joined(0, 1), joined(1, 2)], [joined(0, 2)])


def _bundle_pair(t: Trial) -> BundlePairLoop:
    return BundlePairLoop(t.loop(), t.loop(), t.loop())


THIN_KINDS = ("rotation", "reparam", "rotating-warp")


def _c16(t: Trial):
    """Transport integrand along a thin family; trials cycle through the kinds."""
    x = t.x
    pair = _bundle_pair(t)
    kind = THIN_KINDS[t.index % len(THIN_KINDS)]
    if kind == "rotation":
        fam = geo.pt_rotation_family(pair, t.cfg.S)
    else:
        schedule = warp_schedule() if kind == "reparam" else rotating_warp_schedule()
        fam = geo.pt_reparam_family(pair, schedule, t.cfg.S)
    z1, z2, r = geo.pt_terms(t.tc, fam, t.ip)
    terms = np.concatenate([(1 - x) / 2 * z1, (2 - x) / 2 * z2, x / 2 * r])
    rows = (1 - x) / 2 * z1 + (2 - x) / 2 * z2 + x / 2 * r
    worst = float(np.max(np.abs(rows)))
    defect = max(thinness_defect(c) for c in (fam.m, fam.g1, fam.g2))
    integral = float(geo.trapezoid_weights(fam.S) @ rows)
    return Sample([worst], [0.0], list(terms),
                  {"max_abs_integrand": worst, "thinness_defect": defect, "integral": integral, "family": kind})


def counterexample_fixture() -> dict:
    text = resources.files("loopforms").joinpath("fixtures/derived.json").read_text()
    return json.loads(text)["counterexample"]


def fixture_loop(N: int) -> DiscreteLoop:
    gen = counterexample_fixture()["generator"]
    shape = tuple(gen["shape"])
    a = (np.array(gen["a"]["re"]) + 1j * np.array(gen["a"]["im"])).reshape(shape)
    b = (np.array(gen["b"]["re"]) + 1j * np.array(gen["b"]["im"])).reshape(shape)
    return loop_from_generator(FourierGenerator(a, b), N)


def _c17(t: Trial):
    """Rotation of the fixture loop against a constant second leg; the
    integral should equal (1 - x)/2 times the oracle value Y."""
    x = t.x
    fx = counterexample_fixture()
    tau = fixture_loop(t.cfg.N)
    m0, g0 = t.group(2)
    fam = geo.pt_counterexample(tau, m0, g0, t.cfg.S)
    z1, z2, r = geo.pt_terms(t.tc, fam, t.ip)
    rows = (1 - x) / 2 * z1 + (2 - x) / 2 * z2 + x / 2 * r
    integral = float(geo.trapezoid_weights(fam.S) @ rows)
    expected = (1 - x) / 2 * fx["Y"] * t.ip.level
    threshold = abs(expected) * fx["threshold_factor"]
    defect = thinness_defect(fam.g1)
    info = {"integral": integral, "expected": expected, "threshold": threshold,
            "exceeds_threshold": bool(abs(integral) >= threshold) if expected else None,
            "thinness_defect": defect}
    return Sample([integral], [expected], list((1 - x) / 2 * z1), info)


REGISTRY: dict[str, CheckSpec] = {s.name: s for s in [
    CheckSpec("C1", "multiplicativity of H: pr1*H + pr2*H = m*H + dρ on G×G", "FD", _c1, "random point of G^2, 3 tangents"),
    CheckSpec("C2", "ρ is a simplicial cocycle: Δρ = 0 on G^3", "QUAD", _c2, "random point of G^3, 2 tangents"),
    CheckSpec("C3", "H is closed: dH = 0 on G", "FD", _c3, "random point of G, 4 tangents"),
    CheckSpec("C4", "ε = τ(ρ) on LG×LG", "QUAD", _c4, "2 random loops, band-limited fields"),
    CheckSpec("C5", "ω(Ad⁻¹X, Ad⁻¹Y) = ω(X,Y) + Z(τ,[X,Y]) and r(τγ, Ad_γ⁻¹X) = r(τ,X) − Z(γ,X)", "QUAD", _c5,
              "loops and fields; runs both C5a and C5b"),
    CheckSpec("C6", "−½ω(θ∧θ) = −τ(H) + dβ on LG", "FD", _c6, "1 random loop, 2 fields"),
    CheckSpec("C7", "Δζ = −r(τ₂, Ad_δ Y) + Z(δ, Ā(X₂)) + Z(δ, Ad_δ Y) on LP^[2]", "QUAD", _c7, "3 random loops"),
    CheckSpec("C8", "Δξ = −Lδ₂*ε on LP^[3]", "QUAD", _c8, "4 random loops"),
    CheckSpec("C9", "dξ = −½Lδ*ω(θ∧θ) + Lδ*τ(H) + Z(Lδ, dĀ) − ω(Lδ*θ ∧ Ad⁻¹Ā)", "FD", _c9, "3 random loops, 2 fields"),
    CheckSpec("C10", "ΔB_corr = curv(χ_corr) on LP^[2]", "FD", _c10, "3 random loops, 2 fields"),
    CheckSpec("C11", "ξ − ½Δζ = τ(ω_CS) on LP^[2]", "QUAD", _c11, "3 random loops, 1 field"),
    CheckSpec("C12", "CS(pr₂*A) − CS(pr₁*A) = δ*H + dω_CS on P^[2]", "FD", _c12, "random point of P^[2], 3 tangents"),
    CheckSpec("C13", "pr₁₃*ω_CS = δ₂*ρ + pr₁₂*ω_CS + pr₂₃*ω_CS on P^[3]", "QUAD", _c13, "random point of P^[3]"),
    CheckSpec("C14", "B_corr = −τ(CS(A)) on LP", "FD", _c14, "2 random loops, 2 fields"),
    CheckSpec("C15", "fusion: λ(γ₁∪γ₂) + λ(γ₂∪γ₃) = λ(γ₁∪γ₃)", "QUAD", _c15,
              "3 paths with common endpoints and sitting instants"),
    CheckSpec("C16", "transport integrand vanishes on thin families when x = 1", "QUAD", _c16,
              "rotation, warp, or warp then rotation of a loop in P^[2]", 1.0),
    CheckSpec("C17", "rotation counterexample: ∫ = (1−x)/2 ∫ y_t dt", "QUAD", _c17,
              "fixture loop rotated against a constant leg", 0.0),
]}

ALIASES: dict[str, CheckSpec] = {
    "C5a": CheckSpec("C5a", "ω(Ad⁻¹X, Ad⁻¹Y) = ω(X,Y) + Z(τ,[X,Y])", "QUAD", _c5a, "1 loop, 2 fields"),
    "C5b": CheckSpec("C5b", "r(τγ, Ad_γ⁻¹X) = r(τ,X) − Z(γ,X)", "QUAD", _c5b, "loop in P, loop in G, 1 field"),
}

FD_CLASSES = ("FD", "FD2")


def lookup(name: str) -> tuple[int, CheckSpec]:
    names = list(REGISTRY)
    if name in REGISTRY:
        return names.index(name), REGISTRY[name]
    if name in ALIASES:
        return names.index("C5"), ALIASES[name]
    raise UnknownCheck(f"no check named {name!r}; known: {', '.join(names + list(ALIASES))}")


def run_check(name: str, cfg: RunConfig | None = None, **overrides) -> CheckResult:
    cfg = replace(cfg or RunConfig(), **overrides)
    idx, spec = lookup(name)
    x = cfg.x if cfg.x is not None else spec.x_default
    worst, skipped, info = 0.0, 0, []
    for trial in range(cfg.trials):
        seq = np.random.SeedSequence([cfg.seed, idx, trial])
        try:
            samples = spec.runner(Trial(cfg, seq, x, trial))
        except DegenerateInput:
            skipped += 1
            continue
        for s in samples if isinstance(samples, list) else [samples]:
            worst = max(worst, relative_residual(s.lhs, s.rhs, s.scale))
            if s.info:
                info.append(s.info)
    tol = TOLERANCES[spec.tolerance_class]
    too_many_skipped = skipped > MAX_SKIP_FRACTION * cfg.trials
    extra = _summarize(info)
    if x is not None:
        extra["x"] = x
    defect = extra.pop("thinness_defect", None)
    return CheckResult(
        name=spec.name,
        paper_anchor=spec.anchor,
        tolerance_class=spec.tolerance_class,
        trials=cfg.trials,
        skipped=skipped,
        max_rel_residual=worst,
        tolerance=tol,
        passed=bool(worst <= tol and not too_many_skipped),
        config=cfg.echo(),
        thinness_defect=defect,
        under_resolved=spec.tolerance_class in FD_CLASSES and cfg.N < MIN_FD_SAMPLES,
        extra=extra,
    )


def _summarize(info: list[dict]) -> dict:
    if not info:
        return {}
    out = {}
    for key in info[0]:
        vals = [d[key] for d in info]
        if all(isinstance(v, bool) or v is None for v in vals):
            known = [v for v in vals if v is not None]
            out[key] = all(known) if known else None
        elif all(isinstance(v, (int, float)) for v in vals):
            out[key] = float(max(vals, key=abs))
            if key == "integral":
                out["integral_min_abs"] = float(min(abs(v) for v in vals))
        else:
            out[key] = sorted(set(map(str, vals)))
    return out


def _run_named(args):
    name, cfg = args
    return run_check(name, cfg)


def run_all(cfg: RunConfig | None = None, workers: int = 1) -> list[CheckResult]:
    """Every registered check (or cfg.checks if set), in registry order."""
    cfg = cfg or RunConfig()
    names = list(cfg.checks) or list(REGISTRY)
    for n in names:
        lookup(n)
    if workers <= 1:
        return [run_check(n, cfg) for n in names]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(_run_named, [(n, cfg) for n in names]))


def convergence_study(name: str, grid, cfg: RunConfig | None = None, trials: int = 4) -> list[dict]:
    """Max relative residual at each (N, h) grid point. Richardson
    extrapolation is switched off so the raw finite-difference order shows."""
    cfg = cfg or RunConfig()
    lookup(name)
    rows = []
    for N, h in grid:
        r = run_check(name, cfg, N=int(N), h=float(h), richardson=False, trials=trials)
        rows.append({"N": int(N), "h": float(h), "max_rel_residual": r.max_rel_residual})
    return rows


def observed_ratios(rows: list[dict]) -> list[float | None]:
    """Successive residual ratios; about 4 for a second-order method when h
    halves. None where the finer residual is exactly zero."""
    res = [r["max_rel_residual"] for r in rows]
    return [a / b if b else None for a, b in zip(res, res[1:])]
