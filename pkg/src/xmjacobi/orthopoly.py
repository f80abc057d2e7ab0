"""Classical and exceptional (X_m) Jacobi polynomials, weights, norms and orthogonality.

Every polynomial is stored in the variable ``y = cosh(2 rho)`` of the
bound-state problem, which is also ``cosh r`` in the rescaled coordinate
``r = 2 rho`` used for scattering.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np
from numpy.polynomial import legendre as npleg
from numpy.polynomial import polynomial as nppoly

from .errors import (
    CoefficientSingularityError,
    DenominatorZeroError,
    DomainError,
    ParameterError,
    QuadratureWarning,
)
from .params import FamilyParams
from .specfun import gamma_ratio

SINGULAR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class RealPolynomial:
    """Dense real polynomial, ``coeffs[q]`` multiplies ``y**q``.

    Trailing zeros are trimmed so the degree is well defined; the zero
    polynomial has an empty coefficient array and degree -1.
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls) -> "RealPolynomial":
        return cls(np.zeros(0))

    @classmethod
    def one(cls) -> "RealPolynomial":
        return cls(np.ones(1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y):
        if not len(self.coeffs):
            return np.zeros_like(np.asarray(y, dtype=float)) if np.ndim(y) else 0.0
        return nppoly.polyval(y, self.coeffs)

    def naive(self, y: float) -> float:
        """Term-by-term power sum; reference for the Horner path."""
        return math.fsum(c * y**q for q, c in enumerate(self.coeffs))

    def deriv(self, order: int = 1) -> "RealPolynomial":
        if self.degree < order:
            return RealPolynomial.zero()
        return RealPolynomial(nppoly.polyder(self.coeffs, order))

    def __add__(self, other: "RealPolynomial") -> "RealPolynomial":
        return RealPolynomial(nppoly.polyadd(self._c(), other._c()))

    def __sub__(self, other: "RealPolynomial") -> "RealPolynomial":
        return RealPolynomial(nppoly.polysub(self._c(), other._c()))

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            if self.degree < 0 or other.degree < 0:
                return RealPolynomial.zero()
            return RealPolynomial(nppoly.polymul(self.coeffs, other.coeffs))
        return RealPolynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def _c(self):
        return self.coeffs if len(self.coeffs) else np.zeros(1)

    def allclose(self, other: "RealPolynomial", rtol: float = 1e-12) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.pad(self.coeffs, (0, n - len(self.coeffs)))
        b = np.pad(other.coeffs, (0, n - len(other.coeffs)))
        scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0), 1e-300)
        return bool(np.all(np.abs(a - b) <= rtol * scale))

    def to_json(self) -> str:
        return json.dumps([float(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "RealPolynomial":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("polynomial JSON must be an array of coefficients")
        return cls(np.array(data, dtype=float))

    def __repr__(self):
        return f"RealPolynomial({list(self.coeffs)!r})"


def _check_denominator(name: str, value: float) -> float:
    if abs(value) < SINGULAR_TOL:
        raise CoefficientSingularityError(name, value)
    return value


def jacobi_explicit(n: int, a: float, b: float) -> RealPolynomial:
    """Jacobi polynomial from the finite hypergeometric sum.

    ``P_n = (1/n!) sum_j C(n,j) (a+j+1)_{n-j} (a+b+n+1)_j ((y-1)/2)^j``.
    The gamma ratios are written as Pochhammer products, so the sum is
    finite for every real ``a, b``.
    """
    if n < 0:
        return RealPolynomial.zero()
    half = np.array([-0.5, 0.5])  # (y - 1)/2
    total = np.zeros(n + 1)
    power = np.ones(1)
    for j in range(n + 1):
        coef = math.comb(n, j)
        for t in range(n - j):
            coef *= a + j + 1 + t
        for t in range(j):
            coef *= a + b + n + 1 + t
        total[: len(power)] += coef * power
        power = nppoly.polymul(power, half)
    return RealPolynomial(total / math.factorial(n))


@lru_cache(maxsize=1024)
def _jacobi_cached(n: int, a: float, b: float) -> RealPolynomial:
    if n < 0:
        return RealPolynomial.zero()
    p_prev = np.ones(1)
    if n == 0:
        return RealPolynomial(p_prev)
    p_cur = np.array([(a - b) / 2, (a + b + 2) / 2])
    for k in range(2, n + 1):
        s = 2 * k + a + b
        den = 2 * k * (k + a + b) * (s - 2)
        if abs(den) < SINGULAR_TOL:
            return jacobi_explicit(n, a, b)
        c1 = (s - 1) * (a * a - b * b)
        c2 = (s - 1) * s * (s - 2)
        c3 = 2 * (k + a - 1) * (k + b - 1) * s
        nxt = c2 * nppoly.polymulx(p_cur)
        nxt[: len(p_cur)] += c1 * p_cur
        nxt[: len(p_prev)] -= c3 * p_prev
        p_prev, p_cur = p_cur, nxt / den
    return RealPolynomial(p_cur)


def jacobi_classical(n: int, a: float, b: float) -> RealPolynomial:
    """Classical Jacobi polynomial ``P_n^(a,b)(y)`` by three-term recurrence.

    Negative ``a, b`` are allowed. If a recurrence denominator
    ``2k(k+a+b)(2k+a+b-2)`` vanishes the explicit sum is used instead;
    that sum has no singular parameter set. ``P_{-1}`` is the zero polynomial.
    """
    if not isinstance(n, (int, np.integer)):
        raise ParameterError("degree must be an integer")
    return _jacobi_cached(int(n), float(a), float(b))


def xi_poly(m: int, g: float, h: float) -> RealPolynomial:
    """Denominator polynomial ``xi_m(y; g, h) = P_m^(-g-m-1/2, -h+m-3/2)(y)``.

    Takes raw ``(g, h)`` so that shifted parameter sets can be formed
    without admissibility checks; ``xi_{-1} = xi_{-2} = 0``.
    """
    if m < 0:
        return RealPolynomial.zero()
    return jacobi_classical(m, -g - m - 0.5, -h + m - 1.5)


def xi_m(params: FamilyParams) -> RealPolynomial:
    """Denominator polynomial ``xi_m(y; lambda)`` of the deformed potential."""
    return xi_poly(params.m, params.g, params.h)


def xm_jacobi(nu: int, params: FamilyParams) -> RealPolynomial:
    """Exceptional X_m Jacobi polynomial of degree ``nu + m``.

    Built from classical Jacobi pieces with ``alpha = g+m-1/2``,
    ``beta = -h+m-1/2``::

        [P_m^(-a-2,b) + 2nu(m-a+b-1)/((2m-a+b-2)(2nu+a+b)) P_{m-1}^(-a,b)
         - nu(b+m-1)/((a+nu-m+1)(2m-a+b-2)) P_{m-2}^(-a,b)] P_nu^(a,b)
        + (m-a+b-1)(a+nu)/((a+nu-m+1)(2nu+a+b)) P_{m-1}^(-a,b) P_{nu-1}^(a,b)
    """
    if nu < 0:
        raise ParameterError("nu must be >= 0")
    m, al, be = params.m, params.alpha, params.beta
    d_shift = _check_denominator("(2m-alpha+beta-2)", 2 * m - al + be - 2)
    d_nu = _check_denominator("(alpha+nu-m+1)", al + nu - m + 1)
    d_sum = _check_denominator("(2nu+alpha+beta)", 2 * nu + al + be)

    lead = jacobi_classical(m, -al - 2, be)
    lead = lead + jacobi_classical(m - 1, -al, be) * (2 * nu * (m - al + be - 1) / (d_shift * d_sum))
    lead = lead - jacobi_classical(m - 2, -al, be) * (nu * (be + m - 1) / (d_nu * d_shift))
    tail = jacobi_classical(m - 1, -al, be) * jacobi_classical(nu - 1, al, be)
    tail = tail * ((m - al + be - 1) * (al + nu) / (d_nu * d_sum))
    return lead * jacobi_classical(nu, al, be) + tail


def ab_coefficients(nu: int, params: FamilyParams) -> tuple[RealPolynomial, RealPolynomial]:
    """The polynomial coefficients ``a_{m,nu}(y)`` and ``b_{m,nu}(y)``.

    Both are combinations of denominator polynomials at shifted parameters::

        a = xi_m(g+1,h-1) + 2nu(-g-h+m-1) xi_{m-1}(g,h-2) / ((-g-h+2m-2)(g-h+2nu+2m-1))
                          - nu(-2h+4m-3) xi_{m-2}(g+1,h-3) / ((2g+2nu+1)(-g-h+2m-2))
        b = (-g-h+m-1)(2g+2nu+2m-1) xi_{m-1}(g,h-2) / ((2g+2nu+1)(g-h+2nu+2m-1))
    """
    g, h, m = params.g, params.h, params.m
    d1 = _check_denominator("(-g-h+2m-2)", -g - h + 2 * m - 2)
    d2 = _check_denominator("(g-h+2nu+2m-1)", g - h + 2 * nu + 2 * m - 1)
    d3 = _check_denominator("(2g+2nu+1)", 2 * g + 2 * nu + 1)
    xi_lo = xi_poly(m - 1, g, h - 2)
    a = (
        xi_poly(m, g + 1, h - 1)
        + xi_lo * (2 * nu * (-g - h + m - 1) / (d1 * d2))
        - xi_poly(m - 2, g + 1, h - 3) * (nu * (-2 * h + 4 * m - 3) / (d3 * d1))
    )
    b = xi_lo * ((-g - h + m - 1) * (2 * g + 2 * nu + 2 * m - 1) / (d3 * d2))
    return a, b


def pmn_via_ab(nu: int, params: FamilyParams) -> RealPolynomial:
    """``P_{m,nu} = a_{m,nu} P_nu(.; lambda+m delta) + b_{m,nu} P_{nu-1}(.; lambda+m delta)``.

    ``P_nu(y; g, h)`` is the GPT polynomial ``P_nu^(g-1/2, -h-1/2)(y)``.
    """
    if nu < 0:
        raise ParameterError("nu must be >= 0")
    if nu > params.nu_max:
        raise ParameterError(f"nu={nu} exceeds nu_B - m = {params.nu_B - params.m}")
    a, b = ab_coefficients(nu, params)
    gs, hs = params.g + params.m, params.h - params.m
    return a * jacobi_classical(nu, gs - 0.5, -hs - 0.5) + b * jacobi_classical(nu - 1, gs - 0.5, -hs - 0.5)


def _log_weight(params: FamilyParams, rho):
    """``log phi_m(rho)^2`` with ``phi_m = exp(omega_0(rho; lambda+m delta)) / xi_m(cosh 2rho)``."""
    rho = np.asarray(rho, dtype=float)
    gs, hs = params.g + params.m, params.h - params.m
    with np.errstate(divide="ignore"):
        log_xi = _log_abs_poly_cosh2(xi_m(params), rho)
    if np.any(np.isneginf(log_xi)):
        raise DenominatorZeroError("xi_m vanishes on the integration domain")
    log_sinh = rho + np.log(-np.expm1(-2 * rho)) - math.log(2.0)
    log_cosh = rho + np.log1p(np.exp(-2 * rho)) - math.log(2.0)
    return 2 * (gs * log_sinh - hs * log_cosh) - 2 * log_xi


def _log_abs_poly_cosh2(p: RealPolynomial, rho):
    """``log|p(cosh 2 rho)|`` through the reversed polynomial in ``1/y`` (no overflow)."""
    log_y = 2 * rho + np.log1p(np.exp(-4 * rho)) - math.log(2.0)
    inv_y = np.exp(-log_y)
    return p.degree * log_y + np.log(np.abs(nppoly.polyval(inv_y, p.coeffs[::-1])))


def weight_phi_squared(params: FamilyParams, r):
    """Orthogonality weight ``phi_m(r)^2`` in the bound-state coordinate.

    Decays like ``exp(-2 (h - g) r)`` as ``r -> inf``.
    """
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("weight requires r > 0")
    out = np.exp(_log_weight(params, arr))
    return float(out) if out.ndim == 0 else out


def norm_gpt(nu: int, g: float, h: float) -> float:
    """GPT norm ``h_nu(g,h) = G(nu+g+1/2) G(h-g-nu+1) / (2 nu! (h-g-2nu) G(h-nu+1/2))``."""
    val = gamma_ratio([nu + g + 0.5, h - g - nu + 1], [nu + 1, h - nu + 0.5])
    return float((val / (2 * (h - g - 2 * nu))).real)


def norm_h(nu: int, params: FamilyParams, reading: str = "h-m") -> float:
    """Closed-form squared norm ``h_{m,nu}(g,h)`` of ``P_{m,nu}`` under ``phi_m^2``.

    ``h_nu(g+m, h-m) (nu+g+m+1/2)(h-nu-2m+1/2) / ((nu+g+1/2)(h-nu-m+1/2))``.
    ``reading="g-m"`` evaluates the alternative argument pattern
    ``h_nu(g+m, g-m)``; it is kept for diagnostics only.
    """
    g, h, m = params.g, params.h, params.m
    if nu not in params.bound_indices():
        raise ParameterError(f"nu={nu} is not a normalizable bound-state index")
    if reading == "h-m":
        base = norm_gpt(nu, g + m, h - m)
    elif reading == "g-m":
        base = norm_gpt(nu, g + m, g - m)
    else:
        raise ParameterError(f"unknown reading {reading!r}")
    corr = (nu + g + m + 0.5) * (h - nu - 2 * m + 0.5) / ((nu + g + 0.5) * (h - nu - m + 0.5))
    return base * corr


@dataclass(frozen=True)
class QuadratureConfig:
    """Panel Gauss-Legendre settings for integrals over ``[0, r_max]``.

    ``r_max=None`` picks the cutoff where the integrand envelope drops
    below ``1e-16`` of its peak. ``panels`` is the starting panel count;
    it is doubled until successive results agree to ``rel_tol``.
    """

    r_max: float | None = None
    panels: int = 16
    nodes_per_panel: int = 20
    rel_tol: float = 1e-10
    warn_tol: float = 1e-9
    max_doublings: int = 6

    def __post_init__(self):
        if self.r_max is not None and not self.r_max > 0:
            raise ParameterError("r_max must be positive")
        if self.panels < 1:
            raise ParameterError("panels must be >= 1")
        if self.nodes_per_panel < 2:
            raise ParameterError("nodes_per_panel must be >= 2")


class IntegralResult(NamedTuple):
    value: float
    panels: int
    warning: QuadratureWarning | None


def _cutoff(params: FamilyParams, polys: list[RealPolynomial]) -> float:
    rho = np.linspace(1e-3, 150.0, 15001)
    logw = _log_weight(params, rho)
    with np.errstate(divide="ignore"):
        env = np.max([2 * _log_abs_poly_cosh2(p, rho) for p in polys], axis=0)
    log_f = logw + env
    peak = np.max(log_f)
    above = np.flatnonzero(log_f > peak + math.log(1e-16))
    return float(rho[above[-1]]) * 1.05 + 0.5


def _panel_edges(r_max: float, panels: int) -> np.ndarray:
    edges = np.linspace(0.0, r_max, panels + 1)
    # geometric grading into the first panel for non-integer powers rho**(2g+2m)
    first = edges[1]
    graded = first * 0.2 ** np.arange(8, 0, -1)
    return np.concatenate([[0.0], graded, edges[1:]])


def _gram_on_panels(params, polys, edges, nodes, weights):
    """Per-panel Gram matrix contributions, summed with compensated summation."""
    n = len(polys)
    contrib = [[[] for _ in range(n)] for _ in range(n)]
    abs_contrib = [[[] for _ in range(n)] for _ in range(n)]
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        wq = 0.5 * (hi - lo) * weights
        w = np.exp(_log_weight(params, x)) * wq
        y = np.cosh(2 * x)
        vals = [p(y) for p in polys]
        for i in range(n):
            for j in range(i, n):
                prod = w * vals[i] * vals[j]
                contrib[i][j].append(float(np.sum(prod)))
                abs_contrib[i][j].append(float(np.sum(np.abs(prod))))
    gram = np.zeros((n, n))
    scale = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = math.fsum(contrib[i][j])
            scale[i, j] = scale[j, i] = math.fsum(abs_contrib[i][j])
    return gram, scale


def gram_matrix(
    params: FamilyParams,
    quad: QuadratureConfig = QuadratureConfig(),
    indices: Iterable[int] | None = None,
    polynomial=pmn_via_ab,
) -> tuple[np.ndarray, IntegralResult]:
    """Matrix of ``int_0^inf phi_m^2 P_{m,nu} P_{m,q} dr`` over bound-state indices.

    Returns ``(gram, info)`` where ``info.value`` is the largest relative
    change seen in the last panel doubling.
    """
    idx = list(params.bound_indices() if indices is None else indices)
    polys = [polynomial(nu, params) for nu in idx]
    r_max = quad.r_max if quad.r_max is not None else _cutoff(params, polys)
    nodes, weights = npleg.leggauss(quad.nodes_per_panel)

    panels = quad.panels
    prev, scale = _gram_on_panels(params, polys, _panel_edges(r_max, panels), nodes, weights)
    change = math.inf
    for _ in range(quad.max_doublings):
        panels *= 2
        cur, scale = _gram_on_panels(params, polys, _panel_edges(r_max, panels), nodes, weights)
        change = float(np.max(np.abs(cur - prev) / scale))
        prev = cur
        if change <= quad.rel_tol:
            break
    warn = None
    if change > quad.warn_tol:
        warn = QuadratureWarning(f"panel doubling changed the result by {change:.3e} (relative)")
        warnings.warn(warn, stacklevel=2)
    return prev, IntegralResult(change, panels, warn)


def orthogonality_integral(
    nu: int, q: int, params: FamilyParams, quad: QuadratureConfig = QuadratureConfig()
) -> IntegralResult:
    """``int_0^inf phi_m^2 P_{m,nu} P_{m,q} dr`` by panel-wise Gauss-Legendre.

    The returned ``warning`` is set when the last panel doubling changed the
    value by more than ``quad.warn_tol`` relative to ``int |integrand|``.
    """
    for idx in (nu, q):
        if idx not in params.bound_indices():
            raise ParameterError(f"index {idx} is not a normalizable bound state")
    indices = [nu] if nu == q else [nu, q]
    gram, info = gram_matrix(params, quad, indices)
    return IntegralResult(float(gram[0, -1]), info.panels, info.warning)


def poly_sign_log(p: RealPolynomial, log_y):
    """Sign and ``log|p(y)|`` for ``y = exp(log_y) >= 1`` without overflow."""
    log_y = np.asarray(log_y, dtype=float)
    if p.degree < 0:
        return np.zeros_like(log_y), np.full_like(log_y, -np.inf)
    rev = nppoly.polyval(np.exp(-log_y), p.coeffs[::-1])
    with np.errstate(divide="ignore"):
        return np.sign(rev), p.degree * log_y + np.log(np.abs(rev))
