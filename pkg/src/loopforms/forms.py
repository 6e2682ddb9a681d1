"""Differential forms on G^k, on fiber products of P = M x G, and on their loop spaces.

Forms are closures over evaluators. Configuration points are arrays of shape
(factors, ..., n, n); loop points are `LoopPoint`s with samples on axis -3.
Tangent data are left-trivialized: a vector at g is g*xi and is passed as xi,
with the same (factors, ...) layout as the point.

For fiber products the first factor is the base point m and the remaining
ones are the fiber coordinates, so P^[k] is stored as G^(k+1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ArityMismatch, StepUnderflow
from .lie import InnerProduct, adjoint, adjoint_inv, bracket, exp_and_dexp
from .loops import LoopPoint, spectral_derivative

MIN_STEP = 1e-8


@dataclass(frozen=True)
class Arity:
    """kind "G": products G^k with bar-construction faces;
    kind "P": fiber products P^[k] with deletion faces."""

    kind: str
    k: int
    loop: bool = False

    @property
    def factors(self) -> int:
        return self.k if self.kind == "G" else self.k + 1

    @property
    def label(self) -> str:
        base = "G" if self.kind == "G" else "P"
        if self.kind == "G":
            s = "×".join([("L" if self.loop else "") + "G"] * self.k)
        else:
            s = ("L" if self.loop else "") + base + ("" if self.k == 1 else f"^[{self.k}]")
        return s

    def looped(self) -> "Arity":
        return Arity(self.kind, self.k, True)

    def finite(self) -> "Arity":
        return Arity(self.kind, self.k, False)


G1, G2, G3 = Arity("G", 1), Arity("G", 2), Arity("G", 3)
P1, P2, P3 = Arity("P", 1), Arity("P", 2), Arity("P", 3)


def _factor_count(point) -> int:
    return point.factors if isinstance(point, LoopPoint) else np.shape(point)[0]


@dataclass(frozen=True, eq=False)
class Form:
    degree: int
    arity: Arity
    evaluator: Callable
    name: str = ""

    def __call__(self, point, *tangents):
        if len(tangents) != self.degree:
            raise TypeError(f"{self.name or 'form'} takes {self.degree} tangents, got {len(tangents)}")
        if _factor_count(point) != self.arity.factors:
            raise ArityMismatch(f"point has {_factor_count(point)} factors, {self.arity.label} needs {self.arity.factors}")
        if self.arity.loop != isinstance(point, LoopPoint):
            raise ArityMismatch(f"{self.arity.label} evaluated on the wrong kind of point")
        return self.evaluator(point, *tangents)

    def _compatible(self, other: "Form"):
        if self.degree != other.degree or self.arity != other.arity:
            raise ArityMismatch(f"cannot combine {self.arity.label}/{self.degree} with {other.arity.label}/{other.degree}")

    def __add__(self, other: "Form") -> "Form":
        self._compatible(other)
        return Form(self.degree, self.arity, lambda p, *x: self.evaluator(p, *x) + other.evaluator(p, *x),
                    f"({self.name} + {other.name})")

    def __sub__(self, other: "Form") -> "Form":
        self._compatible(other)
        return Form(self.degree, self.arity, lambda p, *x: self.evaluator(p, *x) - other.evaluator(p, *x),
                    f"({self.name} - {other.name})")

    def __rmul__(self, c: float) -> "Form":
        return Form(self.degree, self.arity, lambda p, *x: c * self.evaluator(p, *x), f"{c}*{self.name}")

    def __neg__(self) -> "Form":
        return (-1.0) * self

    def pullback(self, f: "WordMap") -> "Form":
        return pullback(self, f)


def zero_form(degree: int, arity: Arity) -> Form:
    def ev(p, *x):
        g = p.g if isinstance(p, LoopPoint) else p
        lead = g.shape[1:-3] if isinstance(p, LoopPoint) else g.shape[1:-2]
        return np.zeros(lead)

    return Form(degree, arity, ev, "0")


# --- maps between configuration spaces ---------------------------------------

@dataclass(frozen=True)
class WordMap:
    """Map G^a -> G^b whose components are words in the factors and their
    inverses, e.g. ((2, -1), (1, 1)) is g2^-1 g1."""

    words: tuple
    src: Arity
    dst: Arity
    name: str = ""

    def apply(self, g: np.ndarray) -> np.ndarray:
        out = []
        for word in self.words:
            w = None
            for j, e in word:
                a = g[j] if e > 0 else np.conj(np.swapaxes(g[j], -1, -2))
                w = a if w is None else w @ a
            out.append(w)
        return np.stack(out)

    def push(self, g: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Left-trivialized differential: d(w a) = Ad_{a^-1} d(w) + d(a)."""
        out = []
        for word in self.words:
            acc = None
            for j, e in word:
                eta = x[j] if e > 0 else -adjoint(g[j], x[j])
                if acc is None:
                    acc = eta
                else:
                    a = g[j] if e > 0 else np.conj(np.swapaxes(g[j], -1, -2))
                    acc = adjoint_inv(a, acc) + eta
            out.append(acc)
        return np.stack(out)


def pullback(form: Form, f: WordMap) -> Form:
    if f.dst.finite() != form.arity.finite():
        raise ArityMismatch(f"map lands in {f.dst.label}, form lives on {form.arity.label}")
    src = f.src.looped() if form.arity.loop else f.src.finite()
    if form.arity.loop:
        def ev(p, *x):
            q = LoopPoint(f.apply(p.g), f.push(p.g, p.u))
            return form.evaluator(q, *[f.push(p.g, xi) for xi in x])
    else:
        def ev(g, *x):
            return form.evaluator(f.apply(g), *[f.push(g, xi) for xi in x])
    return Form(form.degree, src, ev, f"{f.name}*{form.name}")


def projection(src: Arity, idx: Sequence[int], dst: Arity, name: str = "") -> WordMap:
    return WordMap(tuple(((i, 1),) for i in idx), src.finite(), dst.finite(), name or f"pr{idx}")


def multiplication() -> WordMap:
    return WordMap((((0, 1), (1, 1)),), G2, G1, "m")


def pr_bundle(k: int, idx: Sequence[int]) -> WordMap:
    """P^[k] -> P^[len(idx)], keeping the base and fiber slots idx (1-based)."""
    return projection(Arity("P", k), (0,) + tuple(idx), Arity("P", len(idx)),
                      "pr" + "".join(str(i) for i in idx))


def delta_map() -> WordMap:
    """Difference map P^[2] -> G, (m, g1, g2) -> g2^-1 g1."""
    return WordMap((((2, -1), (1, 1)),), P2, G1, "delta")


def delta2_map() -> WordMap:
    """P^[3] -> G^2, (m, g1, g2, g3) -> (g3^-1 g2, g2^-1 g1)."""
    return WordMap((((3, -1), (2, 1)), ((2, -1), (1, 1))), P3, G2, "delta2")


def face_maps(arity: Arity) -> list[WordMap]:
    """Faces d_0, ..., d_k from the (k+1)-fold space onto `arity`."""
    k = arity.k
    if arity.kind == "G":
        src = Arity("G", k + 1)
        faces = [WordMap(tuple(((j, 1),) for j in range(1, k + 1)), src, arity.finite(), "d0")]
        for i in range(1, k + 1):
            words = []
            for j in range(k + 1):
                if j == i - 1:
                    words.append(((j, 1), (j + 1, 1)))
                elif j != i:
                    words.append(((j, 1),))
            faces.append(WordMap(tuple(words), src, arity.finite(), f"d{i}"))
        faces.append(WordMap(tuple(((j, 1),) for j in range(k)), src, arity.finite(), f"d{k + 1}"))
        return faces
    if arity.kind == "P":
        src = Arity("P", k + 1)
        faces = []
        for i in range(k + 1):
            keep = [0] + [j for j in range(1, k + 2) if j != i + 1]
            faces.append(WordMap(tuple(((j, 1),) for j in keep), src, arity.finite(), f"d{i}"))
        return faces
    raise ArityMismatch(f"no simplicial structure on {arity.label}")


def simplicial_delta(form: Form) -> Form:
    """Alternating sum of pullbacks along the face maps."""
    if form.arity.kind == "G" and form.arity.k < 1:
        raise ArityMismatch("bar complex starts at G^1")
    terms = [pullback(form, f) for f in face_maps(form.arity)]
    out = terms[0]
    for i, t in enumerate(terms[1:], 1):
        out = out + t if i % 2 == 0 else out - t
    return Form(form.degree, out.arity, out.evaluator, f"Δ{form.name}")


# --- exterior derivative -----------------------------------------------------

def _chart(point, xi: np.ndarray, s: float, others: Sequence[np.ndarray]):
    """Point p*exp(s xi) with the coordinate fields of the exponential chart."""
    if isinstance(point, LoopPoint):
        dxi = spectral_derivative(xi)
        e, outs = exp_and_dexp(s * xi, list(others) + [s * dxi])
        q = LoopPoint(point.g @ e, adjoint_inv(e, point.u) + outs[-1])
        return q, outs[:-1]
    e, outs = exp_and_dexp(s * xi, list(others))
    return point @ e, outs


def derivative_terms(form: Form, h: float = 1e-3, richardson: bool = False) -> Callable:
    """Evaluator returning the d+1 signed summands (-1)^i ∂_i ω(..X̂_i..) of dω."""
    if h < MIN_STEP:
        raise StepUnderflow(f"h={h} below {MIN_STEP}")

    def terms(p, *x):
        out = []
        for i in range(len(x)):
            others = x[:i] + x[i + 1:]

            def central(step):
                qp, op = _chart(p, x[i], step, others)
                qm, om = _chart(p, x[i], -step, others)
                return (form.evaluator(qp, *op) - form.evaluator(qm, *om)) / (2 * step)

            di = central(h)
            if richardson:
                di = (4 * central(h / 2) - di) / 3
            out.append(di if i % 2 == 0 else -di)
        return out

    return terms


def exterior_derivative(form: Form, h: float = 1e-3, richardson: bool = False) -> Form:
    """dω(X_0..X_d) = Σ (-1)^i ∂_i ω(..X̂_i..) in the chart p exp(Σ s_i X_i),
    where coordinate fields commute; central differences in each s_i."""
    terms = derivative_terms(form, h, richardson)

    def ev(p, *x):
        if len(x) != form.degree + 1:
            raise TypeError(f"d{form.name} takes {form.degree + 1} tangents")
        return sum(terms(p, *x))

    return Form(form.degree + 1, form.arity, ev, f"d{form.name}")


# --- transgression -----------------------------------------------------------

def transgress(form: Form) -> Form:
    """∫_0^1 ω_{τ(z)}(∂_z τ, X_1(z), ...) dz by the periodic trapezoid rule."""
    if form.degree < 1:
        raise ArityMismatch("transgression needs degree >= 1")
    if form.arity.loop:
        raise ArityMismatch("form already lives on a loop space")

    def ev(p: LoopPoint, *x):
        return np.mean(form.evaluator(p.g, p.u, *x), axis=-1)

    return Form(form.degree - 1, form.arity.looped(), ev, f"τ({form.name})")


# --- algebra-valued forms and wedges -----------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraForm:
    """g-valued form: (point, *tangents) -> algebra element."""

    degree: int
    arity: Arity
    fn: Callable
    name: str = ""

    def __call__(self, g, *x):
        return self.fn(g, *x)


def theta(arity: Arity = G1, slot: int = 0) -> AlgebraForm:
    """Left Maurer-Cartan form of the factor `slot`."""
    return AlgebraForm(1, arity, lambda g, x: x[slot], f"θ{slot}")


def theta_bar(arity: Arity = G1, slot: int = 0) -> AlgebraForm:
    """Right Maurer-Cartan form of the factor `slot`."""
    return AlgebraForm(1, arity, lambda g, x: adjoint(g[slot], x[slot]), f"θ̄{slot}")


def _same(*forms):
    a = forms[0].arity
    if any(f.arity != a for f in forms):
        raise ArityMismatch("wedge factors live on different spaces")
    return a


def wedge_pair(alpha: AlgebraForm, beta: AlgebraForm, ip: InnerProduct) -> Form:
    """<α∧β>(X,Y) = <α(X),β(Y)> - <α(Y),β(X)>."""
    arity = _same(alpha, beta)

    def ev(g, x, y):
        return ip(alpha(g, x), beta(g, y)) - ip(alpha(g, y), beta(g, x))

    return Form(2, arity, ev, f"<{alpha.name}∧{beta.name}>")


def bracket_wedge(beta: AlgebraForm, gamma: AlgebraForm) -> AlgebraForm:
    """[β∧γ](Y,Z) = [β(Y),γ(Z)] - [β(Z),γ(Y)]."""
    arity = _same(beta, gamma)
    return AlgebraForm(2, arity, lambda g, y, z: bracket(beta(g, y), gamma(g, z)) - bracket(beta(g, z), gamma(g, y)),
                       f"[{beta.name}∧{gamma.name}]")


def wedge_one_two(alpha: AlgebraForm, f: AlgebraForm, ip: InnerProduct) -> Form:
    """<α∧F>(X,Y,Z) for a 1-form α and a 2-form F, shuffle signs."""
    arity = _same(alpha, f)

    def ev(g, x, y, z):
        return ip(alpha(g, x), f(g, y, z)) - ip(alpha(g, y), f(g, x, z)) + ip(alpha(g, z), f(g, x, y))

    return Form(3, arity, ev, f"<{alpha.name}∧{f.name}>")


def wedge_triple(alpha: AlgebraForm, beta: AlgebraForm, gamma: AlgebraForm, ip: InnerProduct) -> Form:
    """<α∧[β∧γ]>."""
    return wedge_one_two(alpha, bracket_wedge(beta, gamma), ip)


def alternation_residual(form: Form, point, tangents: Sequence[np.ndarray]) -> float:
    """Relative violation of antisymmetry under swapping the first two slots."""
    if form.degree < 2:
        return 0.0
    a = np.asarray(form(point, *tangents))
    sw = list(tangents)
    sw[0], sw[1] = sw[1], sw[0]
    b = np.asarray(form(point, *sw))
    return float(np.max(np.abs(a + b)) / (np.max(np.abs(a)) + 1e-300))
