"""Regenerate the golden reference data with exact/high-precision tools.

Polynomials come from an exact binomial-sum Jacobi formula in sympy rationals
(no code shared with the package); S-matrix values and norms from mpmath at
30 digits. Run from the repository root:

    python3 tests/golden/make_golden.py
"""

import json
from pathlib import Path

import mpmath as mp
import sympy as sp

mp.mp.dps = 30
y = sp.Symbol("y")
R = sp.Rational
OUT = Path(__file__).with_name("reference.json")


def jac(n, a, b):
    """``sum_j C(n+a, n-j) C(n+b, j) ((y-1)/2)**j ((y+1)/2)**(n-j)``.

    Regular for every rational ``a, b`` (sympy's own ``jacobi`` returns
    ``zoo`` when ``a + b`` is a negative integer).
    """
    if n < 0:
        return sp.Integer(0)
    terms = (
        sp.binomial(n + a, n - j) * sp.binomial(n + b, j) * ((y - 1) / 2) ** j * ((y + 1) / 2) ** (n - j)
        for j in range(n + 1)
    )
    return sp.expand(sp.Add(*terms))


def _self_check():
    for n, a, b in [(3, R(1, 2), R(-3, 2)), (4, R(2, 3), R(5, 7))]:
        assert sp.expand(jac(n, a, b) - sp.jacobi(n, a, b, y)) == 0


def coeffs(expr):
    poly = sp.Poly(sp.expand(expr), y)
    return [float(c) for c in reversed(poly.all_coeffs())]


def xi(m, g, h):
    return jac(m, -g - m - R(1, 2), -h + m - R(3, 2))


def xm(nu, g, h, m):
    al, be = g + m - R(1, 2), -h + m - R(1, 2)
    lead = (
        jac(m, -al - 2, be)
        + 2 * nu * (m - al + be - 1) / ((2 * m - al + be - 2) * (2 * nu + al + be)) * jac(m - 1, -al, be)
        - nu * (be + m - 1) / ((al + nu - m + 1) * (2 * m - al + be - 2)) * jac(m - 2, -al, be)
    )
    tail = (m - al + be - 1) * (al + nu) / ((al + nu - m + 1) * (2 * nu + al + be)) * jac(m - 1, -al, be) * jac(nu - 1, al, be)
    return sp.expand(lead * jac(nu, al, be) + tail)


def s_matrix(g, h, m, k):
    A, B = mp.mpf(h - g - 2 * m) / 2, mp.mpf(g + h) / 2
    ik = 1j * mp.mpf(k)
    G = mp.gamma
    s = -G(2 * ik) * G(-A - ik) * G(B - ik + 0.5) * mp.power(2, -4 * ik) / (G(-A + ik) * G(-2 * ik) * G(B + ik + 0.5))
    br = (B - ik + 0.5) * (B + ik + 0.5 - m) / ((B + ik + 0.5) * (B - ik + 0.5 - m))
    return s * br


def norm(nu, g, h, m):
    p = sp.lambdify(y, xm(nu, g, h, m), "mpmath")
    q = sp.lambdify(y, xi(m, g, h), "mpmath")

    def f(rho):
        yy = mp.cosh(2 * rho)
        return mp.sinh(rho) ** (2 * (g + m)) * mp.cosh(rho) ** (-2 * (h - m)) / q(yy) ** 2 * p(yy) ** 2

    return mp.quad(f, [0, 1, 3, 8, mp.inf])


def main():
    _self_check()
    ref = {"jacobi": [], "xi": [], "xm": [], "smatrix": [], "norms": []}
    for n, a, b in [(0, R(1, 2), R(-3, 2)), (3, R(1, 2), R(-3, 2)), (4, R(-7, 2), R(-19, 2)), (5, R(3, 10), R(1, 7))]:
        ref["jacobi"].append({"n": n, "a": float(a), "b": float(b), "coeffs": coeffs(jac(n, a, b))})
    for m, g, h in [(1, 1, 3), (1, 1, 10), (2, 1, 10), (3, 2, 11), (2, R(1, 2), R(17, 2))]:
        ref["xi"].append({"m": m, "g": float(g), "h": float(h), "coeffs": coeffs(xi(m, g, h))})
    cases = [(0, 1, 10, 0), (2, 1, 10, 0), (0, 1, 10, 1), (3, 1, 10, 1), (0, 1, 10, 2), (2, 1, 10, 2),
             (0, 2, 9, 3), (1, 2, 11, 3), (1, R(1, 2), R(17, 2), 2)]
    for nu, g, h, m in cases:
        ref["xm"].append({"nu": nu, "g": float(g), "h": float(h), "m": m, "coeffs": coeffs(xm(nu, g, h, m))})
    for g, h, m, k in [(1, 10, 0, 0.5), (1, 10, 1, 1.3), (1, 10, 2, 2.0), (3, 8, 0, 1.7), (2, 13.5, 5, 7.25)]:
        s = s_matrix(g, h, m, k)
        ref["smatrix"].append({"g": g, "h": h, "m": m, "k": k, "re": float(s.real), "im": float(s.imag)})
    for nu, g, h, m in [(0, 1, 10, 0), (3, 1, 10, 0), (0, 1, 10, 1), (2, 1, 10, 2), (1, R(1, 2), R(17, 2), 2)]:
        ref["norms"].append({"nu": nu, "g": float(g), "h": float(h), "m": m, "value": float(norm(nu, g, h, m))})
    OUT.write_text(json.dumps(ref, indent=1) + "\n")


if __name__ == "__main__":
    main()
