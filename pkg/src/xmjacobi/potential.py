"""Prepotential, potential family, bound spectrum and closed-form eigenfunctions.

Two coordinates appear:

* ``rho`` -- the bound-state coordinate, polynomials in ``cosh 2 rho`` and
  energies ``E_raw = 4 nu (h - g - 2m - nu)``.
* ``r = 2 rho`` -- the rescaled coordinate used for scattering. There
  ``V_hat(r) = V_m(r/2)/4``, ``E_hat = E_raw/4 = nu (2A - nu)`` and the
  continuum starts at ``V_hat(inf) = A**2``. Subtracting the threshold gives
  bound energies ``-(A - nu)**2`` and continuum energies ``k**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as nppoly

from .errors import DenominatorZeroError, DomainError, ParameterError
from .orthopoly import RealPolynomial, norm_h, poly_sign_log, xi_m, xi_poly, xm_jacobi
from .params import FamilyParams

LEADING_ORDER_R = 1e-6


def _log_terms(p: RealPolynomial, y):
    """``log|p|``, ``p'/p`` and ``p''/p - (p'/p)**2`` at ``y`` from the roots of ``p``."""
    if p.degree <= 0:
        zero = np.zeros_like(y)
        return np.full_like(y, math.log(abs(p.coeffs[0]))), zero, zero
    roots = nppoly.polyroots(p.coeffs)
    diff = y[..., None] - roots
    if np.any(np.abs(diff) <= 1e-14 * np.maximum(1.0, np.abs(y[..., None]))):
        raise DenominatorZeroError("xi_m vanishes at the evaluation point")
    inv = 1.0 / diff
    log_abs = math.log(abs(p.coeffs[-1])) + np.sum(np.log(np.abs(diff)), axis=-1)
    return log_abs, np.sum(inv, axis=-1).real, -np.sum(inv * inv, axis=-1).real


def omega_terms(g: float, h: float, m: int, rho):
    """``(omega, omega', omega'')`` of the prepotential at raw parameters, in ``rho``.

    ``omega_m = omega_0(rho; g+m, h-m) + log|xi_m(y; g+1, h-1) / xi_m(y; g, h)|``
    with ``y = cosh 2 rho`` and ``omega_0 = g log sinh - h log cosh``.
    No admissibility check, so shifted sets like ``(g+1, h-1)`` can be used.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("prepotential requires r > 0")
    gs, hs = g + m, h - m
    log_sinh = rho + np.log(-np.expm1(-2 * rho)) - math.log(2.0)
    log_cosh = rho + np.log1p(np.exp(-2 * rho)) - math.log(2.0)
    coth, tanh = 1.0 / np.tanh(rho), np.tanh(rho)
    w0 = gs * log_sinh - hs * log_cosh
    w1 = gs * coth - hs * tanh
    w2 = -gs * (coth * coth - 1.0) - hs * (1.0 - tanh * tanh)
    if m:
        y = np.cosh(2 * rho)
        dy = 2 * np.sinh(2 * rho)
        ddy = 4 * y
        for sign, poly in ((1.0, xi_poly(m, g + 1, h - 1)), (-1.0, xi_poly(m, g, h))):
            log_abs, d1, d2 = _log_terms(poly, np.atleast_1d(y))
            log_abs, d1, d2 = (x.reshape(y.shape) for x in (log_abs, d1, d2))
            w0 = w0 + sign * log_abs
            w1 = w1 + sign * d1 * dy
            w2 = w2 + sign * (d2 * dy * dy + d1 * ddy)
    return w0, w1, w2


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def prepotential_omega(params: FamilyParams, r):
    """``omega_m(r; lambda)``; at ``m = 0`` this is ``g log sinh r - h log cosh r``."""
    return _scalar(omega_terms(params.g, params.h, params.m, r)[0])


def potential_vm(params: FamilyParams, r, curvature_sign: int = 1):
    """``V_m = omega_m'**2 + omega_m''`` in the bound-state coordinate.

    ``curvature_sign=-1`` gives the partner combination ``omega'**2 - omega''``
    (used only to show that it does not carry the eigenfunctions).
    """
    _, w1, w2 = omega_terms(params.g, params.h, params.m, r)
    return _scalar(w1 * w1 + curvature_sign * w2)


def potential_hat(params: FamilyParams, r, curvature_sign: int = 1):
    """Rescaled potential ``V_m(r/2)/4``; tends to ``A**2`` as ``r -> inf``."""
    return _scalar(0.25 * np.asarray(potential_vm(params, np.asarray(r, dtype=float) / 2, curvature_sign)))


def potential_scattering(params: FamilyParams, r):
    """Threshold-shifted potential ``V_hat(r) - A**2`` (continuum energy ``k**2``)."""
    return _scalar(np.asarray(potential_hat(params, r)) - params.A**2)


def potential_asymptote(params: FamilyParams) -> float:
    """``lim V_m = (g - h + 2m)**2 = 4 A**2`` in the bound-state coordinate."""
    return (params.g - params.h + 2 * params.m) ** 2


def energy_raw(nu, g, h, m=0):
    """``E_{m,nu}(g,h) = 4 nu (h - g - 2m - nu)``; exact for ``int``/``Fraction`` input."""
    return 4 * nu * (h - g - 2 * m - nu)


def energy_e1(g: float, h: float, m: int = 0) -> float:
    """``E_1(lambda + m delta) = 4 (h - g - 2m - 1)``."""
    return energy_raw(1, g + m, h - m)


def shape_invariance_residual(params: FamilyParams, r):
    """``w'(l)**2 - w''(l) - w'(l+d)**2 - w''(l+d) - E_1(l+m d)`` for ``w = omega_m``.

    Vanishes identically when ``omega_m`` is shape invariant.
    """
    g, h, m = params.g, params.h, params.m
    _, a1, a2 = omega_terms(g, h, m, r)
    _, b1, b2 = omega_terms(g + 1, h - 1, m, r)
    return _scalar(a1 * a1 - a2 - b1 * b1 - b2 - energy_e1(g, h, m))


@dataclass(frozen=True)
class SpectrumEntry:
    nu: int
    energy_raw: float
    energy_scattering: float


def bound_energies(params: FamilyParams) -> list[SpectrumEntry]:
    """Discrete levels ``nu = 0 .. floor(nu_B - m)``.

    When ``A`` is an integer the last entry lies at the threshold
    (``energy_scattering == 0``) and is not normalizable.
    """
    out = []
    for nu in range(params.nu_max + 1):
        raw = energy_raw(nu, params.g, params.h, params.m)
        out.append(SpectrumEntry(nu, float(raw), -((params.A - nu) ** 2)))
    return out


@dataclass(frozen=True)
class EigenfunctionSpec:
    nu: int
    params: FamilyParams
    normalization: float

    def __post_init__(self):
        if self.nu not in self.params.bound_indices():
            raise ParameterError(f"nu={self.nu} is not a normalizable bound state")
        if not self.normalization > 0:
            raise ParameterError("normalization must be positive")


def normalization_constant(params: FamilyParams, nu: int) -> float:
    """``N`` with ``int_0^inf psi**2 dr = 1`` in the rescaled coordinate.

    The unnormalized integral is ``2**(g + 2m - h + 1) h_{m,nu}``.
    """
    return math.sqrt(2.0 ** (params.h - params.g - 2 * params.m - 1) / norm_h(nu, params))


def eigenfunction_spec(params: FamilyParams, nu: int) -> EigenfunctionSpec:
    return EigenfunctionSpec(nu, params, normalization_constant(params, nu))


def eigenfunction_value(spec: EigenfunctionSpec, r):
    """Bound state in the rescaled coordinate.

    ``psi = N (cosh r - 1)**((g+m)/2) (cosh r + 1)**((m-h)/2) Phat_{nu+m}(cosh r) / xi_m(cosh r)``.
    Below ``r = 1e-6`` the leading term ``psi ~ r**(g+m)`` is used.
    """
    p = spec.params
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("eigenfunction requires r > 0")
    poly, xi = xm_jacobi(spec.nu, p), xi_m(p)
    s = p.g + p.m
    flat = np.atleast_1d(arr)
    out = np.empty_like(flat)

    small = flat < LEADING_ORDER_R
    if np.any(small):
        c0 = 2.0 ** (-s / 2) * 2.0 ** ((p.m - p.h) / 2) * poly(1.0) / xi(1.0)
        out[small] = spec.normalization * c0 * flat[small] ** s
    big = ~small
    if np.any(big):
        x = flat[big]
        log_sinh = x / 2 + np.log(-np.expm1(-x)) - math.log(2.0)
        log_cosh = x / 2 + np.log1p(np.exp(-x)) - math.log(2.0)
        log_pref = 0.5 * s * (math.log(2.0) + 2 * log_sinh) + 0.5 * (p.m - p.h) * (math.log(2.0) + 2 * log_cosh)
        log_y = x + np.log1p(np.exp(-2 * x)) - math.log(2.0)
        sp, lp = poly_sign_log(poly, log_y)
        sx, lx = poly_sign_log(xi, log_y)
        if np.any(sx == 0):
            raise DenominatorZeroError("xi_m vanishes at the evaluation point")
        out[big] = spec.normalization * sp * sx * np.exp(log_pref + lp - lx)
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def count_nodes(values) -> int:
    """Number of sign changes, ignoring exact zeros."""
    v = np.asarray(values, dtype=float)
    v = v[v != 0]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def schrodinger_residual(
    spec: EigenfunctionSpec,
    grid_step: float = 1e-3,
    r_range: tuple[float, float] = (0.05, 20.0),
    curvature_sign: int = 1,
) -> float:
    """``max |-psi'' + (V_hat - E_hat) psi| / max |psi|`` on a uniform grid.

    ``psi''`` uses the five-point O(h**4) stencil, so ``grid_step = 1e-3``
    leaves a truncation error far below 1e-5. ``E_hat = nu (2A - nu)``.
    """
    p = spec.params
    lo, hi = r_range
    if not 0 < lo < hi:
        raise DomainError("r_range must satisfy 0 < lo < hi")
    n = int(round((hi - lo) / grid_step))
    r = lo + grid_step * np.arange(n + 1)
    psi = eigenfunction_value(spec, r)
    d2 = (-psi[4:] + 16 * psi[3:-1] - 30 * psi[2:-2] + 16 * psi[1:-3] - psi[:-4]) / (12 * grid_step**2)
    v = potential_hat(p, r[2:-2], curvature_sign)
    e_hat = spec.nu * (2 * p.A - spec.nu)
    res = -d2 + (v - e_hat) * psi[2:-2]
    return float(np.max(np.abs(res)) / np.max(np.abs(psi)))
