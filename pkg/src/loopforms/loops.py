"""Discretized loops and paths in G, tangent fields, joins and thin families.

A loop is stored as N samples at z_j = j/N together with its left
logarithmic derivative u = tau^-1 d tau/dz. When a loop comes from a Fourier
generator the velocity is exact; otherwise it is estimated from the samples.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BandLimitError, DegenerateInput, EndpointMismatch, GridError, PlateauViolation
from .lie import (
    adjoint_inv,
    dagger,
    exp_and_dexp,
    log_map,
    project_algebra,
    project_unitary,
    random_algebra,
)

SMOOTHNESS_BOUND = 0.5
ENDPOINT_TOL = 1e-12
PLATEAU_TOL = 1e-12


# --- derivative estimators -------------------------------------------------

def spectral_derivative(a: np.ndarray, axis: int = -3) -> np.ndarray:
    """d/dz of periodic samples on [0,1) along `axis`, Nyquist mode dropped."""
    n = a.shape[axis]
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0
    shape = [1] * a.ndim
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(a, axis=axis) * (2j * np.pi * k).reshape(shape), axis=axis)


def left_log_derivative(samples: np.ndarray, method: str = "spectral") -> np.ndarray:
    """tau^-1 d tau/dz along axis -3 of a periodic sample array."""
    n = samples.shape[-3]
    if method == "spectral":
        return project_algebra(dagger(samples) @ spectral_derivative(samples))
    if method == "log-quotient":
        fwd = log_map(dagger(samples) @ np.roll(samples, -1, axis=-3))
        bwd = log_map(dagger(samples) @ np.roll(samples, 1, axis=-3))
        return 0.5 * n * (fwd - bwd)
    if method == "fd4":
        r = lambda s: np.roll(samples, s, axis=-3)
        d = n * (8 * (r(-1) - r(1)) - (r(-2) - r(2))) / 12
        return project_algebra(dagger(samples) @ d)
    raise ValueError(f"unknown derivative method {method!r}")


# --- generators --------------------------------------------------------------

@dataclass(frozen=True)
class FourierGenerator:
    """tau(z) = exp(sum_k a_k cos(2 pi k z) + b_k sin(2 pi k z))."""

    a: np.ndarray  # (K, n, n)
    b: np.ndarray

    def algebra(self, z: np.ndarray):
        k = np.arange(1, len(self.a) + 1)
        ph = 2 * np.pi * np.multiply.outer(z, k)
        c, s = np.cos(ph)[..., None, None], np.sin(ph)[..., None, None]
        f = np.sum(c * self.a + s * self.b, axis=-3)
        w = (2 * np.pi * k)[:, None, None]
        df = np.sum(w * (c * self.b - s * self.a), axis=-3)
        return f, df

    def __call__(self, z) -> tuple[np.ndarray, np.ndarray]:
        f, df = self.algebra(np.asarray(z, float))
        g, (u,) = exp_and_dexp(f, [df])
        return g, u

    def to_dict(self) -> dict:
        return {"a": _cplx_to_list(self.a), "b": _cplx_to_list(self.b), "shape": list(self.a.shape)}

    @classmethod
    def from_dict(cls, d: dict) -> "FourierGenerator":
        shape = tuple(d["shape"])
        return cls(_list_to_cplx(d["a"], shape), _list_to_cplx(d["b"], shape))


def _cplx_to_list(a: np.ndarray) -> dict:
    return {"re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}


def _list_to_cplx(d: dict, shape) -> np.ndarray:
    return (np.array(d["re"]) + 1j * np.array(d["im"])).reshape(shape)


# --- loops -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteLoop:
    samples: np.ndarray  # (N, n, n)
    velocity: np.ndarray | None = None  # left log derivative, (N, n, n)
    generator: Callable | None = field(default=None, repr=False)
    method: str = "spectral"

    def __post_init__(self):
        s = np.asarray(self.samples, complex)
        if s.ndim != 3 or s.shape[-1] != s.shape[-2]:
            raise ValueError("samples must have shape (N, n, n)")
        if s.shape[0] % 2:
            raise ValueError("N must be even")
        object.__setattr__(self, "samples", s)
        if self.velocity is None:
            object.__setattr__(self, "velocity", left_log_derivative(s, self.method))

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[-1]

    def step_defect(self) -> float:
        """max_j ||tau_{j+1} tau_j^-1 - I|| (operator norm)."""
        q = np.roll(self.samples, -1, axis=0) @ dagger(self.samples)
        return float(np.linalg.norm(q - np.eye(self.n), ord=2, axis=(-2, -1)).max())

    def is_smooth(self) -> bool:
        return self.step_defect() <= SMOOTHNESS_BOUND

    def require_smooth(self) -> "DiscreteLoop":
        if not self.is_smooth():
            raise DegenerateInput(f"loop step defect {self.step_defect():.3g} > {SMOOTHNESS_BOUND}")
        return self

    def evaluator(self) -> Callable:
        """z -> (tau(z), u(z)) off the grid: exact for generated loops,
        Fourier interpolation otherwise."""
        if self.generator is not None:
            return self.generator
        return _spectral_interpolant(self.samples)


def _spectral_interpolant(samples: np.ndarray) -> Callable:
    n = samples.shape[0]
    coef = np.fft.fft(samples, axis=0) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        # split the Nyquist mode symmetrically so real-analytic data stays consistent
        nyq = coef[n // 2] / 2
        coef = np.concatenate([coef, nyq[None]])
        coef[n // 2] = nyq
        k = np.concatenate([k, [n // 2]])
        k[n // 2] = -n // 2

    def ev(z):
        z = np.asarray(z, float)
        e = np.exp(2j * np.pi * np.multiply.outer(z, k))
        g = np.tensordot(e, coef, axes=(-1, 0))
        dg = np.tensordot(e * (2j * np.pi * k), coef, axes=(-1, 0))
        g = project_unitary(g)
        return g, project_algebra(dagger(g) @ dg)

    return ev


def grid(N: int) -> np.ndarray:
    return np.arange(N) / N


def loop_from_generator(gen: FourierGenerator, N: int) -> DiscreteLoop:
    g, u = gen(grid(N))
    return DiscreteLoop(g, u, gen)


def _coefficients(rng, modes, amplitude, n):
    k = np.arange(1, modes + 1)[:, None, None]
    a = random_algebra(rng, n, modes) * amplitude / k**2
    b = random_algebra(rng, n, modes) * amplitude / k**2
    return a, b


def random_loop(seed: int, modes: int = 4, amplitude: float = 0.5, N: int = 256, n: int = 2) -> DiscreteLoop:
    """Seeded band-limited loop exp(sum a_k cos + b_k sin), coefficients ~ 1/k^2."""
    if modes > N // 4:
        raise BandLimitError(f"K={modes} exceeds N/4={N // 4}")
    a, b = _coefficients(np.random.default_rng(seed), modes, amplitude, n)
    return loop_from_generator(FourierGenerator(a, b), N)


def constant_loop(g: np.ndarray, N: int = 256) -> DiscreteLoop:
    g = np.asarray(g, complex)
    return DiscreteLoop(np.broadcast_to(g, (N,) + g.shape).copy(), np.zeros((N,) + g.shape, complex))


def random_field(seed: int, N: int = 256, modes: int = 4, amplitude: float = 1.0, n: int = 2, lead=()) -> np.ndarray:
    """Band-limited algebra-valued field on the loop grid, shape lead + (N, n, n)."""
    if modes > N // 4:
        raise BandLimitError(f"K={modes} exceeds N/4={N // 4}")
    rng = np.random.default_rng(seed)
    lead = tuple(np.atleast_1d(lead)) if lead != () else ()
    k = np.arange(modes + 1)
    c = random_algebra(rng, n, lead + (modes + 1,)) / (1 + k[:, None, None]) ** 2
    s = random_algebra(rng, n, lead + (modes + 1,)) / (1 + k[:, None, None]) ** 2
    ph = 2 * np.pi * np.multiply.outer(grid(N), k)
    out = np.einsum("zk,...kij->...zij", np.cos(ph), c) + np.einsum("zk,...kij->...zij", np.sin(ph), s)
    return amplitude * out


@dataclass(frozen=True, eq=False)
class TangentField:
    """Left-trivialized tangent vector X(z) = tau(z) xi(z) along a carrier."""

    xi: np.ndarray
    carrier: object = None

    def __post_init__(self):
        if self.carrier is not None and self.carrier.samples.shape[0] != np.shape(self.xi)[-3]:
            raise ValueError("field length does not match its carrier")


# --- loops in products of G --------------------------------------------------

@dataclass(frozen=True, eq=False)
class LoopPoint:
    """A loop in G^k: samples g and velocities u of shape (k, ..., N, n, n)."""

    g: np.ndarray
    u: np.ndarray

    @property
    def factors(self) -> int:
        return self.g.shape[0]

    @property
    def N(self) -> int:
        return self.g.shape[-3]


def loop_point(*loops: DiscreteLoop) -> LoopPoint:
    return LoopPoint(np.stack([l.samples for l in loops]), np.stack([l.velocity for l in loops]))


@dataclass(frozen=True, eq=False)
class BundlePairLoop:
    """Loop in P^[2] for P = M x G: base loop and two fiber loops."""

    base: DiscreteLoop
    g1: DiscreteLoop
    g2: DiscreteLoop

    def point(self) -> LoopPoint:
        return loop_point(self.base, self.g1, self.g2)

    def delta(self) -> DiscreteLoop:
        """The difference loop g2^-1 g1."""
        d = dagger(self.g2.samples) @ self.g1.samples
        u = self.g1.velocity - adjoint_inv(d, self.g2.velocity)
        return DiscreteLoop(d, u)


# --- paths with sitting instants ---------------------------------------------

def _smoothstep(x: np.ndarray):
    """C-infinity step 0 -> 1 on [0,1] with all derivatives zero at the ends."""
    x = np.clip(x, 0.0, 1.0)
    inner = (x > 0) & (x < 1)
    xs = np.where(inner, x, 0.5)
    f0, f1 = np.exp(-1 / xs), np.exp(-1 / (1 - xs))
    s = f0 / (f0 + f1)
    ds = (f0 / xs**2 * f1 + f0 * f1 / (1 - xs) ** 2) / (f0 + f1) ** 2
    return np.where(inner, s, (x >= 1).astype(float)), np.where(inner, ds, 0.0)


def plateau_schedule(N: int, plateau: int):
    """phi(t_j) on t_j = j/N, constant on the first and last `plateau` samples."""
    t = np.arange(N + 1) / N
    lo, hi = (plateau - 1) / N, (N - plateau + 1) / N
    s, ds = _smoothstep((t - lo) / (hi - lo))
    return s, ds / (hi - lo)


@dataclass(frozen=True, eq=False)
class DiscretePath:
    samples: np.ndarray  # (N+1, n, n)
    velocity: np.ndarray  # left log derivative in t
    plateau: int

    @property
    def N(self) -> int:
        return self.samples.shape[0] - 1

    def __post_init__(self):
        p = self.plateau
        if p < 1 or 2 * p > self.N + 1:
            raise ValueError("plateau out of range")
        s = self.samples
        if not (np.array_equal(s[:p], np.broadcast_to(s[0], s[:p].shape))
                and np.array_equal(s[-p:], np.broadcast_to(s[-1], s[-p:].shape))):
            raise ValueError("plateau samples are not constant")


def random_path(seed: int, modes: int = 4, amplitude: float = 0.5, plateau: int | None = None,
                N: int = 256, n: int = 2, start: np.ndarray | None = None,
                end_shift: np.ndarray | None = None) -> DiscretePath:
    """Path start * exp(F(phi(t))) with F(0) = 0, F(1) = end_shift and a
    seeded band-limited bump vanishing at both ends; phi has sitting instants."""
    if modes > N // 4:
        raise BandLimitError(f"K={modes} exceeds N/4={N // 4}")
    plateau = N // 8 if plateau is None else plateau
    rng = np.random.default_rng(seed)
    a, b = _coefficients(rng, modes, amplitude, n)
    if end_shift is None:
        end_shift = random_algebra(rng, n, scale=amplitude)
    if start is None:
        start = np.eye(n, dtype=complex)
    phi, dphi = plateau_schedule(N, plateau)
    k = np.arange(1, modes + 1)
    ph = np.pi * np.multiply.outer(phi, k)
    c, s = np.cos(ph)[..., None, None], np.sin(ph)[..., None, None]
    bump = np.sum(c * a + s * b, axis=-3)
    dbump = np.sum((np.pi * k)[:, None, None] * (c * b - s * a), axis=-3)
    w = (phi * (1 - phi))[:, None, None]
    dw = (1 - 2 * phi)[:, None, None]
    f = phi[:, None, None] * end_shift + w * bump
    df = (end_shift + dw * bump + w * dbump) * dphi[:, None, None]
    e, (u,) = exp_and_dexp(f, [df])
    g = start @ e
    # pin sitting instants bit-exactly
    g[:plateau] = g[0]
    g[-plateau:] = g[-1]
    u[:plateau] = 0
    u[-plateau:] = 0
    return DiscretePath(g, u, plateau)


def path_field(seed: int, path: DiscretePath, modes: int = 4, amplitude: float = 1.0, lead=()) -> np.ndarray:
    """Random tangent field along a path vanishing on its sitting instants."""
    N = path.N
    phi, _ = plateau_schedule(N, path.plateau)
    x = random_field(seed, 2 * N, modes, amplitude, path.samples.shape[-1], lead)[..., : N + 1, :, :]
    return x * (phi * (1 - phi))[:, None, None]


def _check_plateau(x: np.ndarray, p: int):
    head = np.linalg.norm(x[..., :p, :, :], axis=(-2, -1))
    tail = np.linalg.norm(x[..., -p:, :, :], axis=(-2, -1))
    if max(head.max(initial=0), tail.max(initial=0)) > PLATEAU_TOL:
        raise PlateauViolation("tangent field nonzero on a sitting instant")


def _join_index(N: int, decimate: bool):
    first = np.arange(0, N)
    second = np.arange(N, 0, -1)
    if decimate:
        first, second = first[::2], second[::2]
    return first, second


def _can_decimate(N: int, p1: int, p2: int) -> bool:
    return N % 2 == 0 and min(p1, p2) >= 2


def loop_join(g1: DiscretePath, g2: DiscretePath, decimate: bool = True) -> DiscreteLoop:
    """Loop running through g1 on [0, 1/2] and back along g2 on [1/2, 1]."""
    if g1.N != g2.N:
        raise EndpointMismatch("paths live on different grids")
    for i in (0, -1):
        if np.linalg.norm(g1.samples[i] - g2.samples[i]) > ENDPOINT_TOL:
            raise EndpointMismatch("paths do not share endpoints")
    dec = decimate and _can_decimate(g1.N, g1.plateau, g2.plateau)
    i1, i2 = _join_index(g1.N, dec)
    g = np.concatenate([g1.samples[i1], g2.samples[i2]])
    u = np.concatenate([2 * g1.velocity[i1], -2 * g2.velocity[i2]])
    return DiscreteLoop(g, u)


def tangent_join(x1: np.ndarray, x2: np.ndarray, plateau: int | tuple[int, int], decimate: bool = True) -> np.ndarray:
    """Tangent field on loop_join(g1, g2) from fields x1 on g1 and x2 on g2.

    Fields carry the path grid on axis -3 (length N+1)."""
    p1, p2 = (plateau, plateau) if np.isscalar(plateau) else plateau
    _check_plateau(x1, p1)
    _check_plateau(x2, p2)
    N = x1.shape[-3] - 1
    i1, i2 = _join_index(N, decimate and _can_decimate(N, p1, p2))
    return np.concatenate([x1[..., i1, :, :], x2[..., i2, :, :]], axis=-3)


# --- rotations and thin families ---------------------------------------------

def rotate_loop(tau: DiscreteLoop, t: float, resample: bool = True) -> DiscreteLoop:
    """z -> tau(z + t)."""
    shift = t * tau.N
    if abs(shift - round(shift)) < 1e-9:
        s = int(round(shift)) % tau.N
        return DiscreteLoop(np.roll(tau.samples, -s, 0), np.roll(tau.velocity, -s, 0), tau.generator)
    if not resample:
        raise GridError(f"shift {t} is not a multiple of 1/{tau.N}")
    g, u = tau.evaluator()((grid(tau.N) + t) % 1.0)
    return DiscreteLoop(g, u, tau.generator)


@dataclass(frozen=True, eq=False)
class Cylinder:
    """Path of loops Gamma(s_i)(z_j), s_i = i/S, with left-trivialized
    derivatives in s and z, arrays of shape (S+1, N, n, n)."""

    samples: np.ndarray
    ds: np.ndarray
    dz: np.ndarray

    @property
    def S(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def N(self) -> int:
        return self.samples.shape[1]

    def row(self, i: int) -> DiscreteLoop:
        return DiscreteLoop(self.samples[i], self.dz[i])


def constant_cylinder(g: np.ndarray, N: int, S: int) -> Cylinder:
    g = np.broadcast_to(np.asarray(g, complex), (S + 1, N) + np.shape(g)).copy()
    z = np.zeros_like(g)
    return Cylinder(g, z, z.copy())


def rotation_family(tau: DiscreteLoop, S: int = 256) -> Cylinder:
    """Gamma(s)(z) = tau(z + s), s in [0, 1]."""
    s = np.arange(S + 1) / S
    w = (s[:, None] + grid(tau.N)[None, :]) % 1.0
    if tau.generator is not None or tau.N % S:
        g, u = tau.evaluator()(w)
    else:
        rows = [rotate_loop(tau, si) for si in s]
        g = np.stack([r.samples for r in rows])
        u = np.stack([r.velocity for r in rows])
    return Cylinder(g, u, u.copy())


def warp_schedule(eps: float = 0.3):
    """phi(s, z) = z + eps sin(2 pi s) sin(2 pi z) / (2 pi): circle
    diffeomorphisms for |eps| < 1, identity at s = 0 and s = 1."""

    def phi(s, z):
        a = eps * np.sin(2 * np.pi * s)
        w = z + a * np.sin(2 * np.pi * z) / (2 * np.pi)
        ws = eps * np.cos(2 * np.pi * s) * np.sin(2 * np.pi * z)
        wz = 1 + a * np.cos(2 * np.pi * z)
        return w, ws, wz

    return phi


def rotating_warp_schedule(eps: float = 0.3):
    """The warp followed by a full rotation: phi(s, z) + s."""
    warp = warp_schedule(eps)

    def phi(s, z):
        w, ws, wz = warp(s, z)
        return w + s, ws + 1, wz

    return phi


def reparam_family(tau: DiscreteLoop, schedule: Callable | None = None, S: int = 256) -> Cylinder:
    """Gamma(s)(z) = tau(phi(s, z)); `schedule(s, z)` returns phi, d_s phi, d_z phi."""
    schedule = warp_schedule() if schedule is None else schedule
    s = (np.arange(S + 1) / S)[:, None]
    w, ws, wz = schedule(s, grid(tau.N)[None, :])
    g, u = tau.evaluator()(np.mod(w, 1.0))
    return Cylinder(g, ws[..., None, None] * u, wz[..., None, None] * u)


def thinness_defect(c: Cylinder, embedding_dim: int | None = None) -> float:
    """Max second singular value of [d_s Gamma | d_z Gamma] in the flat
    real embedding, both columns by central differences."""
    g = c.samples
    dz = (np.roll(g, -1, axis=1) - np.roll(g, 1, axis=1)) * (c.N / 2)
    if c.S >= 2 and np.allclose(g[0], g[-1], atol=1e-12):
        core = g[:-1]
        ds = (np.roll(core, -1, axis=0) - np.roll(core, 1, axis=0)) * (c.S / 2)
        ds = np.concatenate([ds, ds[:1]])
    else:
        ds = np.gradient(g, 1.0 / c.S, axis=0, edge_order=2)
    flat = lambda a: np.concatenate([a.real, a.imag], axis=-1).reshape(a.shape[:2] + (-1,))
    jac = np.stack([flat(ds), flat(dz)], axis=-1)
    sv = np.linalg.svd(jac, compute_uv=False)
    return float(sv[..., 1].max())


# --- serialization -----------------------------------------------------------

def to_json(obj: DiscreteLoop | DiscretePath) -> str:
    """Row-major complex entries as interleaved (re, im) pairs plus metadata."""
    s = obj.samples
    meta = {
        "kind": "path" if isinstance(obj, DiscretePath) else "loop",
        "N": int(obj.N),
        "n": int(s.shape[-1]),
        "group": "su2" if s.shape[-1] == 2 else f"su{s.shape[-1]}",
        "plateau": int(getattr(obj, "plateau", 0)),
        "samples": np.stack([s.real, s.imag], -1).ravel().tolist(),
        "velocity": np.stack([obj.velocity.real, obj.velocity.imag], -1).ravel().tolist(),
    }
    return json.dumps(meta)


def from_json(text: str) -> DiscreteLoop | DiscretePath:
    d = json.loads(text)
    rows = d["N"] + (1 if d["kind"] == "path" else 0)
    shape = (rows, d["n"], d["n"], 2)
    s = np.array(d["samples"]).reshape(shape)
    v = np.array(d["velocity"]).reshape(shape)
    s, v = s[..., 0] + 1j * s[..., 1], v[..., 0] + 1j * v[..., 1]
    if d["kind"] == "path":
        return DiscretePath(s, v, d["plateau"])
    return DiscreteLoop(s, v)
