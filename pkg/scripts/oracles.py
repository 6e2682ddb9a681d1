#!/usr/bin/env python3
"""Independent oracles for the frozen fixture values used by the test suite.

Nothing here imports the package: brackets use plain Python complex lists,
integrals use mpmath quadrature in high precision, and the SU(2)
normalization integrates in Hopf coordinates (the package uses Euler angles).

    python3 scripts/oracles.py -o src/loopforms/fixtures/derived.json
"""
import argparse
import json
import sys
import time

import mpmath as mp
import numpy as np

PAULI = {
    1: [[0, 1], [1, 0]],
    2: [[0, -1j], [1j, 0]],
    3: [[1, 0], [0, -1]],
}


def mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def scale(c, a):
    return [[c * x for x in row] for row in a]


def sub(a, b):
    return [[a[i][j] - b[i][j] for j in range(2)] for i in range(2)]


def trace(a):
    return a[0][0] + a[1][1]


def isig(k):
    return scale(1j, PAULI[k])


def pauli_oracle():
    out = {}
    for a, b in [(1, 2), (2, 3), (3, 1)]:
        x, y = isig(a), isig(b)
        br = sub(mul(x, y), mul(y, x))
        out[f"[i{a},i{b}]"] = [[[z.real, z.imag] for z in row] for row in br]
    out["pair(i3,i3)"] = (-trace(mul(isig(3), isig(3)))).real
    return out


def mpm(a):
    return mp.matrix([[mp.mpc(x) for x in row] for row in a])


def pair(x, y, level=1):
    p = x * y
    return -level * mp.re(p[0, 0] + p[1, 1])


def fourier_oracle(dps=30):
    mp.mp.dps = dps
    e = mpm(isig(3))

    def tau(z):
        return mp.expm(2 * mp.pi * z * e)

    def dtau(z, h=mp.mpf("1e-20")):
        return (tau(z + h) - tau(z - h)) / (2 * h)

    def z_integrand(z):
        t = tau(z)
        return 2 * pair(dtau(z) * t ** -1, e)

    def beta_integrand(z):
        t = tau(z)
        return pair(t ** -1 * dtau(z), t ** -1 * (t * e))

    def omega_integrand(z):
        x = mp.sin(2 * mp.pi * z) * e
        dy = -2 * mp.pi * mp.sin(2 * mp.pi * z) * e
        return 2 * pair(x, dy)

    return {
        "Z(exp(2pi z i3), i3)": float(mp.quad(z_integrand, [0, 0.5, 1])),
        "beta(exp(2pi z i3), tau i3)": float(mp.quad(beta_integrand, [0, 0.5, 1])),
        "omega(sin E, cos E), E=i3": float(mp.quad(omega_integrand, [0, 0.5, 1])),
    }


def hopf_oracle(nodes=48):
    """Integral of <X,[Y,Z]> pulled back by Hopf coordinates
    (eta, a, b) -> [[e^{ia} sin eta, -e^{-ib} cos eta], [e^{ib} cos eta, e^{-ia} sin eta]]."""

    def g(eta, a, b):
        p, q = np.exp(1j * a) * np.sin(eta), np.exp(1j * b) * np.cos(eta)
        return np.array([[p, -np.conj(q)], [q, np.conj(p)]])

    def partials(eta, a, b):
        p, q = np.exp(1j * a) * np.sin(eta), np.exp(1j * b) * np.cos(eta)
        d_eta = (np.exp(1j * a) * np.cos(eta), -np.exp(1j * b) * np.sin(eta))
        d_a = (1j * p, 0)
        d_b = (0, 1j * q)
        mats = []
        for dp, dq in (d_eta, d_a, d_b):
            mats.append(np.array([[dp, -np.conj(dq)], [dq, np.conj(dp)]]))
        return mats

    x, w = np.polynomial.legendre.leggauss(nodes)
    eta = np.pi / 4 * (x + 1)
    weta = np.pi / 4 * w
    total = 0.0
    angles = np.linspace(0, 2 * np.pi, 6, endpoint=False)
    for e, we in zip(eta, weta):
        vals = []
        for a in angles:
            for b in angles:
                gi = np.linalg.inv(g(e, a, b))
                t1, t2, t3 = (gi @ m for m in partials(e, a, b))
                br = t2 @ t3 - t3 @ t2
                vals.append(-np.trace(t1 @ br).real)
        total += we * np.mean(vals) * (2 * np.pi) ** 2
    return {"integral_H_level1": total, "basic_level": 1.0 / abs(total)}


def counterexample_oracle(seed=2024, modes=3, amplitude=0.8, dps=30, t_nodes=4):
    """Y = int_0^1 y_t dt with y_t = Z(delta(t), d_t delta delta^-1) and
    delta(t)(z) = tau(z + t), evaluated with mpmath quadrature."""
    rng = np.random.default_rng(seed)

    def rand_alg():
        z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        s = 0.5 * (z - z.conj().T)
        s -= np.trace(s) / 2 * np.eye(2)
        return s / np.sqrt(2)

    ks = np.arange(1, modes + 1)
    a = np.array([rand_alg() * amplitude / k**2 for k in ks])
    b = np.array([rand_alg() * amplitude / k**2 for k in ks])
    mp.mp.dps = dps
    am = [mpm(x.tolist()) for x in a]
    bm = [mpm(x.tolist()) for x in b]

    def tau(w):
        f = mp.zeros(2, 2)
        for k, ak, bk in zip(ks, am, bm):
            f += mp.cos(2 * mp.pi * k * w) * ak + mp.sin(2 * mp.pi * k * w) * bk
        return mp.expm(f)

    hz, ht = mp.mpf(10) ** (-dps // 2), mp.mpf(10) ** (-dps // 2 + 1)

    def y_integrand(z, t):
        d = tau(z + t)
        dinv = d ** -1
        dz = (tau(z + hz + t) - tau(z - hz + t)) / (2 * hz) * dinv
        dt = (tau(z + t + ht) - tau(z + t - ht)) / (2 * ht) * dinv
        return 2 * pair(dz, dt)

    xs, ws = np.polynomial.legendre.leggauss(t_nodes)
    ys = []
    for x in xs:
        t = mp.mpf((x + 1) / 2)
        ys.append(mp.quad(lambda z: y_integrand(z, t), mp.linspace(0, 1, 5)))
    big_y = sum(mp.mpf(w / 2) * y for w, y in zip(ws, ys))
    return {
        "generator": {
            "a": {"re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()},
            "b": {"re": b.real.ravel().tolist(), "im": b.imag.ravel().tolist()},
            "shape": list(a.shape),
        },
        "seed": seed,
        "modes": modes,
        "amplitude": amplitude,
        "y_at_nodes": [float(y) for y in ys],
        "Y": float(big_y),
        "threshold_factor": 1 - 1e-6,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", default="src/loopforms/fixtures/derived.json")
    args = ap.parse_args(argv)
    t0 = time.time()
    fixtures = {
        "command": "python3 scripts/oracles.py -o " + args.output,
        "pauli": pauli_oracle(),
        "fourier": fourier_oracle(),
        "normalization": hopf_oracle(),
        "counterexample": counterexample_oracle(),
    }
    fixtures["seconds"] = round(time.time() - t0, 1)
    with open(args.output, "w") as fh:
        json.dump(fixtures, fh, indent=1)
        fh.write("\n")
    print(json.dumps({k: v for k, v in fixtures.items() if k != "counterexample"}, indent=1))
    print("Y =", fixtures["counterexample"]["Y"], file=sys.stderr)


if __name__ == "__main__":
    main()
