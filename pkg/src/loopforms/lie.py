"""Matrix Lie group kernel for SU(n).

Algebra elements are skew-Hermitian traceless n x n complex arrays, group
elements are special unitary arrays. Every function broadcasts over leading
axes, so a loop of N samples is just an array of shape (N, n, n).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError

DRIFT_TOL = 1e-12
BRANCH_TOL = 1e-6

SIGMA = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


def pauli_basis() -> np.ndarray:
    """The basis i*sigma_1, i*sigma_2, i*sigma_3 of su(2), shape (3, 2, 2)."""
    return 1j * SIGMA


def algebra_basis(n: int) -> np.ndarray:
    """A real basis of su(n), shape (n*n - 1, n, n)."""
    if n == 2:
        return pauli_basis()
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            e = np.zeros((n, n), complex)
            e[a, b], e[b, a] = 1, -1
            out.append(e)
            f = np.zeros((n, n), complex)
            f[a, b] = f[b, a] = 1j
            out.append(f)
    for a in range(n - 1):
        d = np.zeros((n, n), complex)
        d[a, a], d[a + 1, a + 1] = 1j, -1j
        out.append(d)
    return np.array(out)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def project_algebra(x: np.ndarray) -> np.ndarray:
    """Nearest skew-Hermitian traceless matrix."""
    n = x.shape[-1]
    s = 0.5 * (x - dagger(x))
    tr = np.trace(s, axis1=-2, axis2=-1)[..., None, None]
    return s - tr * np.eye(n) / n


def random_algebra(rng: np.random.Generator, n: int = 2, size=(), scale: float = 1.0):
    """Gaussian algebra elements with Frobenius norm of order `scale`."""
    shape = tuple(np.atleast_1d(size)) if size != () else ()
    z = rng.standard_normal(shape + (n, n)) + 1j * rng.standard_normal(shape + (n, n))
    return scale * project_algebra(z) / np.sqrt(n)


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def adjoint(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ad_g X = g X g^-1 (g unitary)."""
    return g @ x @ dagger(g)


def adjoint_inv(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ad_{g^-1} X."""
    return dagger(g) @ x @ g


@dataclass(frozen=True)
class InnerProduct:
    """Invariant pairing <X, Y> = -c Re tr(XY)."""

    level: float = 1.0

    def __post_init__(self):
        if not self.level > 0:
            raise ValueError("level must be positive")

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return -self.level * np.einsum("...ij,...ji->...", x, y).real


def pairing(ip: InnerProduct, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return ip(x, y)


def unitary_drift(u: np.ndarray) -> np.ndarray:
    n = u.shape[-1]
    return np.linalg.norm(u @ dagger(u) - np.eye(n), axis=(-2, -1))


def project_unitary(u: np.ndarray) -> np.ndarray:
    """Polar projection onto SU(n): closest unitary, then det fixed to 1."""
    w, _, vh = np.linalg.svd(u)
    q = w @ vh
    n = u.shape[-1]
    det = np.linalg.det(q)
    return q * (det ** (-1.0 / n))[..., None, None]


def reunitarize(u: np.ndarray) -> np.ndarray:
    """Project back to SU(n) only if drift exceeds DRIFT_TOL."""
    if np.all(unitary_drift(u) <= DRIFT_TOL):
        return u
    return project_unitary(u)


def _skew_eig(x: np.ndarray):
    # X = Q diag(i lam) Q^H with lam real
    lam, q = np.linalg.eigh(-1j * x)
    return lam, q


def exp_map(x: np.ndarray) -> np.ndarray:
    """Matrix exponential of algebra elements."""
    lam, q = _skew_eig(x)
    u = (q * np.exp(1j * lam)[..., None, :]) @ dagger(q)
    return reunitarize(u)


def _phi1(x: np.ndarray) -> np.ndarray:
    # (1 - e^{-x}) / x, analytic at 0
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    big = (1 - np.exp(-xs)) / xs
    series = 1 - x / 2 + x * x / 6 - x**3 / 24
    return np.where(small, series, big)


def exp_and_dexp(s: np.ndarray, vs):
    """exp(S) and the left-trivialized derivatives exp(-S) Dexp_S[V] for each V.

    `vs` is a sequence of arrays broadcastable against `s`.
    """
    lam, q = _skew_eig(s)
    qh = dagger(q)
    u = reunitarize((q * np.exp(1j * lam)[..., None, :]) @ qh)
    mu = 1j * lam
    kernel = _phi1(mu[..., :, None] - mu[..., None, :])
    outs = [project_algebra(q @ (kernel * (qh @ v @ q)) @ qh) for v in vs]
    return u, outs


def dexp_left(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """exp(-S) d/de exp(S + eV) at e = 0."""
    return exp_and_dexp(s, [v])[1][0]


def log_map(u: np.ndarray) -> np.ndarray:
    """Principal logarithm of special unitary matrices.

    U is normal, so its Hermitian and anti-Hermitian parts commute; a generic
    real combination of them is Hermitian and shares U's eigenvectors.
    """
    c = 0.5 * (u + dagger(u))
    s = -0.5j * (u - dagger(u))
    _, q = np.linalg.eigh(c + 0.5772156649015329 * s)
    d = np.einsum("...ji,...jk,...ki->...i", np.conj(q), u, q)
    if np.any(np.abs(d + 1) < BRANCH_TOL):
        raise BranchCutError("eigenvalue within 1e-6 of -1")
    ang = np.angle(d)
    return project_algebra((q * (1j * ang)[..., None, :]) @ dagger(q))


def basic_level(nodes: int = 64) -> float:
    """Level c at which the 3-form H integrates to 1 over SU(2).

    Quadrature in Euler angles g = e^{phi E} e^{t F} e^{psi E} with
    E = i sigma_3 / 2, F = i sigma_2 / 2, covering SU(2) once for
    phi in [0, 2pi), t in [0, pi], psi in [0, 4pi).
    """
    e, f = pauli_basis()[2] / 2, pauli_basis()[1] / 2
    t, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * np.pi * (t + 1)
    w = 0.5 * np.pi * w
    psi = np.linspace(0, 4 * np.pi, 8, endpoint=False)
    tt, pp = np.meshgrid(t, psi, indexing="ij")
    ef = exp_map(tt[..., None, None] * f)
    ee = exp_map(pp[..., None, None] * e)
    tail = ef @ ee
    x1 = adjoint_inv(tail, np.broadcast_to(e, tail.shape))
    x2 = adjoint_inv(ee, np.broadcast_to(f, tail.shape))
    x3 = np.broadcast_to(e, tail.shape)
    ip = InnerProduct(1.0)
    h = ip(x1, bracket(x2, x3))
    # integrand independent of phi and psi; average over psi, scale by ranges
    total = np.sum(w * h.mean(axis=1)) * 2 * np.pi * 4 * np.pi
    return 1.0 / abs(total)
