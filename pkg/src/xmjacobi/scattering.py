"""Analytic s-wave S-matrix of the X_m-Jacobi potentials.

``k`` is the wavenumber in the rescaled coordinate, continuum energy ``k**2``
above the threshold ``A**2``. ``S`` is the coefficient of ``e^{ikr}`` in

    psi(r) ~ e^{-ikr} - S e^{ikr},   i.e.   psi ~ sin(kr + delta),  S = e^{2 i delta}.

With this convention the Gauss connection formula gives

    S_GPT = -Gamma(2ik) Gamma(-A-ik) Gamma(B-ik+1/2) 2**(-4ik)
            / (Gamma(-A+ik) Gamma(-2ik) Gamma(B+ik+1/2)),

which is minus the bare gamma expression. The overall sign is fixed by the
radial oracle (direct Numerov integration). The X_m amplitude multiplies
``S_GPT`` by a rational bracket in ``k``.

The closed form is the production path. The asymptotic coefficients
``a .. e``, ``P`` and ``Q`` are kept as an independent verification route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketZeroError, DomainError, NonUnitaryError, ParameterError
from .params import FamilyParams
from .specfun import gamma_ratio

K_MIN = 1e-4
UNITARITY_TOL = 1e-6
BRACKET_TOL = 1e-12

Q_READINGS = ("corrected", "printed", "printed-real-m")


def _check_k(k):
    k = np.asarray(k, dtype=complex)
    if np.any(np.abs(k) < K_MIN):
        raise DomainError(f"|k| must be >= {K_MIN} (threshold k=0 is excluded)")
    return k


def _out(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


def _two_pow(ik):
    # 2**(-4ik) with the principal log of 2
    return np.exp(-4.0 * ik * math.log(2.0))


def s_gpt(A: float, B: float, k):
    """S-matrix of the generalized Poschl-Teller potential (``m = 0``)."""
    ik = 1j * _check_k(k)
    ratio = gamma_ratio([2 * ik, -A - ik, B - ik + 0.5], [-A + ik, -2 * ik, B + ik + 0.5])
    return _out(-np.asarray(ratio) * _two_pow(ik))


def bracket_factor(params: FamilyParams, k):
    """m-dependent rational factor multiplying ``S_GPT``.

    ``[B**2 - (ik-1/2)**2 + (B-ik+1/2)(1-m)] / [B**2 - (ik+1/2)**2 + (B+ik+1/2)(1-m)]``,
    equal to ``(B-ik+1/2)(B+ik+1/2-m) / ((B+ik+1/2)(B-ik+1/2-m))``.
    """
    B, m = params.B, params.m
    ik = 1j * _check_k(k)
    num = B**2 - (ik - 0.5) ** 2 + (B - ik + 0.5) * (1 - m)
    den = B**2 - (ik + 0.5) ** 2 + (B + ik + 0.5) * (1 - m)
    if np.any(np.abs(den) < BRACKET_TOL):
        raise BracketZeroError("denominator bracket vanishes")
    return _out(num / den)


def bracket_factor_factorized(params: FamilyParams, k):
    B, m = params.B, params.m
    ik = 1j * _check_k(k)
    return _out((B - ik + 0.5) * (B + ik + 0.5 - m) / ((B + ik + 0.5) * (B - ik + 0.5 - m)))


def s_xm(params: FamilyParams, k):
    """S-matrix of the X_m potential; identical to :func:`s_gpt` when ``m = 0``."""
    base = s_gpt(params.A, params.B, k)
    if params.m == 0:
        return base
    return _out(np.asarray(base) * np.asarray(bracket_factor(params, k)))


# -- coefficient route -------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Scalars for scalar ``k``; arrays broadcast over an array of ``k``."""

    a: complex
    b: complex
    c: complex
    d: complex
    e: complex
    p_coef: complex | None
    q_coef: complex


def _abcde(A: float, B: float, k):
    ik = 1j * k
    ba = B - A + 0.5
    a = gamma_ratio([B + ik + 0.5], [A + ik + 1, ba])
    b = gamma_ratio([ba, -2 * ik], [-A - ik, B - ik + 0.5])
    c = gamma_ratio([ba, 2 * ik], [-A + ik, B + ik + 0.5])
    d = gamma_ratio([B + ik - 0.5], [A + ik, ba])
    e = gamma_ratio([ba, 2 - 2 * ik], [1 - A - ik, B - ik + 1.5])
    return a, b, c, d, e


def p_coefficient(a, b, d, e, B: float, k: complex) -> complex:
    """``P`` of the X_2 asymptotics."""
    ik = 1j * k
    den = (B + ik - 1.5) * (2 * ik - 1)
    if np.any(np.abs(den) < BRACKET_TOL):
        raise BracketZeroError("P denominator vanishes")
    return _out(((B + ik - 1.5) * (2 * ik - 1) * a * b + 2 * (B + ik - 0.5) * e * d) / den)


def q_coefficient(a, b, d, e, B: float, m: int, k: complex, reading: str = "corrected") -> complex:
    """``Q`` of the X_m asymptotics.

    ``corrected``:       ``ab + m (B+ik-1/2) / ((B+ik-m+1/2)(2ik-1)) ed`` (agrees with ``P`` at m=2)
    ``printed``:         ``ab + m(m-2B-1)(B+ik-1/2) / ((B+ik-i m+1/2)(2ik-1)) ed``
    ``printed-real-m``:  as printed with ``i m`` read as ``m``

    Only the corrected reading reproduces the closed form; the other two
    are kept for diagnostics.
    """
    ik = 1j * k
    if reading == "corrected":
        num, shift = m, B + ik - m + 0.5
    elif reading == "printed":
        num, shift = m * (m - 2 * B - 1), B + ik - 1j * m + 0.5
    elif reading == "printed-real-m":
        num, shift = m * (m - 2 * B - 1), B + ik - m + 0.5
    else:
        raise ParameterError(f"unknown Q reading {reading!r}; choose from {Q_READINGS}")
    den = shift * (2 * ik - 1)
    if np.any(np.abs(den) < BRACKET_TOL):
        raise BracketZeroError("Q denominator vanishes")
    return _out(a * b + num * (B + ik - 0.5) / den * e * d)


def asymptotic_coeffs_xm(params: FamilyParams, k, reading: str = "corrected") -> AsymptoticCoefficients:
    """Coefficients ``a .. e`` and ``Q`` (``P`` too when ``m = 2``)."""
    k = _check_k(k)
    a, b, c, d, e = (_out(x) for x in _abcde(params.A, params.B, k))
    p = p_coefficient(a, b, d, e, params.B, k) if params.m == 2 else None
    q = q_coefficient(a, b, d, e, params.B, params.m, k, reading)
    return AsymptoticCoefficients(a, b, c, d, e, p, q)


def asymptotic_coeffs_x2(params: FamilyParams, k) -> AsymptoticCoefficients:
    """The X_2 special case; ``params.m`` must equal 2."""
    if params.m != 2:
        raise ParameterError(f"X_2 coefficients need m=2, got m={params.m}")
    return asymptotic_coeffs_xm(params, k)


def s_from_coefficients(coeffs: AsymptoticCoefficients, k, route: str = "q") -> complex:
    """``S = -(a c / D) 2**(-4ik)`` with ``D = P`` (``route='p'``) or ``Q``."""
    den = coeffs.p_coef if route == "p" else coeffs.q_coef
    if den is None:
        raise ParameterError("P route is only defined for m=2")
    return _out(-np.asarray(coeffs.a * coeffs.c / den) * _two_pow(1j * np.asarray(k, dtype=complex)))


# -- phase shifts --------------------------------------------------------------


def phase_shift(s) -> float:
    """``delta = arg(S)/2`` in ``(-pi/2, pi/2]`` (``S = -1`` maps to ``pi/2``)."""
    s = complex(s)
    if abs(abs(s) - 1.0) > UNITARITY_TOL:
        raise NonUnitaryError(f"|S| = {abs(s)!r} is not 1")
    if s.imag == 0.0 and s.real < 0:
        return math.pi / 2
    return 0.5 * math.atan2(s.imag, s.real)


def unwrap_phase(deltas):
    """Continuous phase shift along an ordered k-grid (branch jumps of pi removed)."""
    return 0.5 * np.unwrap(2.0 * np.asarray(deltas, dtype=float))


@dataclass(frozen=True)
class SMatrixSample:
    k: float
    s_value: complex
    phase_shift: float
    winding: int = 0

    @property
    def unwrapped(self) -> float:
        return self.phase_shift + math.pi * self.winding


def s_matrix_table(params: FamilyParams, ks, s_values=None) -> list[SMatrixSample]:
    """Samples on an increasing real k-grid with the branch winding tracked.

    ``s_values`` may carry precomputed ``s_xm`` values (e.g. from a parallel sweep).
    """
    ks = np.asarray(ks, dtype=float)
    if np.any(ks < K_MIN):
        raise DomainError(f"k must be >= {K_MIN}")
    if np.any(np.diff(ks) <= 0):
        raise DomainError("k-grid must be strictly increasing")
    s = np.atleast_1d(s_xm(params, ks) if s_values is None else np.asarray(s_values, dtype=complex))
    if s.shape != ks.shape:
        raise ParameterError("s_values must match the k-grid")
    deltas = np.array([phase_shift(v) for v in s])
    wind = np.rint((unwrap_phase(deltas) - deltas) / math.pi).astype(int)
    return [SMatrixSample(float(k), complex(v), float(d), int(w)) for k, v, d, w in zip(ks, s, deltas, wind)]


# -- pole bookkeeping on the positive imaginary axis --------------------------


def bound_state_poles(params: FamilyParams) -> list[float]:
    """``kappa = A - nu`` (``k = i kappa``) for the normalizable bound states."""
    return [params.A - nu for nu in params.bound_indices()]


def bracket_singularities(params: FamilyParams) -> dict:
    """Zeros and poles of the m-bracket as values of ``kappa`` with ``k = i kappa``."""
    B, m = params.B, params.m
    if m == 0:
        return {"poles": [], "zeros": []}
    return {"poles": [B + 0.5, m - B - 0.5], "zeros": [-B - 0.5, B + 0.5 - m]}


def redundant_poles(params: FamilyParams) -> list[float]:
    """Poles of ``S_GPT`` in ``0 < kappa < A`` that are not bound states.

    They come from ``Gamma(2ik) = Gamma(-2 kappa)`` at ``kappa = j/2`` whenever
    the other gamma factors do not cancel them (redundant poles).
    """
    A, B = params.A, params.B
    out = []
    for j in range(1, int(math.ceil(2 * A)) + 1):
        kappa = j / 2
        if not 0 < kappa < A - 1e-12:
            continue
        num = 1 + _is_nonpos_int(-A + kappa)
        den = _is_nonpos_int(-A - kappa) + _is_nonpos_int(B - kappa + 0.5)
        if num - den > 0 and not any(abs(kappa - p) < 1e-12 for p in bound_state_poles(params)):
            out.append(kappa)
    return out


def _is_nonpos_int(x: float) -> int:
    r = round(x)
    return int(r <= 0 and abs(x - r) < 1e-12)
