"""Complex special functions: log-gamma, gamma ratios, Pochhammer symbols and 2F1.

All routines work in double precision. ``ln_gamma`` and ``gamma_ratio`` accept
numpy arrays and broadcast; the hypergeometric routines are scalar.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateError,
    InfinityError,
    ParameterError,
    PoleError,
)

POLE_TOL = 1e-12
DEGENERATE_TOL = 1e-10

# B_2n / (2n (2n-1)) for n = 1..8
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN = 15.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for hypergeometric series."""

    rel_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ParameterError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ParameterError("max_terms must be >= 1")


DEFAULT_SERIES = SeriesControl()


def _pole_mask(z: np.ndarray) -> np.ndarray:
    near = np.rint(z.real)
    return (near <= 0) & (np.abs(z - near) < POLE_TOL)


def is_pole(z) -> bool | np.ndarray:
    """True where ``z`` is within ``POLE_TOL`` of a non-positive integer."""
    arr = np.asarray(z, dtype=complex)
    out = _pole_mask(arr)
    return bool(out) if arr.ndim == 0 else out


def _stirling(w: np.ndarray) -> np.ndarray:
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in reversed(_STIRLING_COEFFS):
        series = series * inv2 + c
    return (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series * inv


def ln_gamma(z):
    """Principal branch of ``log Gamma(z)``.

    Arguments with ``Re z < 15`` are shifted upward with
    ``lnG(z) = lnG(z + n) - sum_j log(z + j)``; the sum of principal logs
    is analytic off the negative real axis, so the result is the principal
    branch (real for real positive ``z``). On the negative real axis the
    value is the limit from ``Im z -> 0+``.

    Raises :class:`PoleError` within ``1e-12`` of ``0, -1, -2, ...``.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    w = np.array(np.atleast_1d(arr), dtype=complex)
    poles = _pole_mask(w)
    if poles.any():
        raise PoleError(f"ln_gamma evaluated at a pole: {w[poles][0]!r}")
    shift = np.maximum(0, np.ceil(_STIRLING_MIN - w.real)).astype(int)
    acc = np.zeros_like(w)
    for j in range(int(shift.max(initial=0))):
        active = shift > j
        acc[active] += np.log(w[active])
        w[active] += 1.0
    out = _stirling(w) - acc
    return complex(out[0]) if scalar else out


def gamma_ratio(numerators: Sequence, denominators: Sequence):
    """``prod Gamma(num) / prod Gamma(den)`` evaluated in log space.

    Pole bookkeeping is done per element: more poles below than above
    gives exactly 0, more above than below raises :class:`InfinityError`,
    and matched poles raise :class:`PoleError` rather than cancelling silently.
    """
    nums = [np.asarray(x, dtype=complex) for x in numerators]
    dens = [np.asarray(x, dtype=complex) for x in denominators]
    shape = np.broadcast_shapes(*(x.shape for x in nums + dens)) if nums or dens else ()
    nums = [np.broadcast_to(x, shape) for x in nums]
    dens = [np.broadcast_to(x, shape) for x in dens]

    n_num = sum((_pole_mask(x).astype(int) for x in nums), np.zeros(shape, dtype=int))
    n_den = sum((_pole_mask(x).astype(int) for x in dens), np.zeros(shape, dtype=int))
    if np.any(n_num > n_den):
        raise InfinityError("unmatched gamma pole in numerator")
    if np.any((n_num == n_den) & (n_num > 0)):
        raise PoleError("gamma poles in numerator and denominator must be resolved analytically")
    zero = n_den > n_num

    log_val = np.zeros(shape, dtype=complex)
    for sign, group in ((1.0, nums), (-1.0, dens)):
        for x in group:
            safe = np.where(_pole_mask(x), 1.0, x)
            log_val = log_val + sign * ln_gamma(safe)
    out = np.where(zero, 0.0, np.exp(np.where(zero, 0.0, log_val)))
    return complex(out) if out.ndim == 0 else out


def pochhammer(a, n: int) -> complex:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)`` by direct product."""
    if n < 0:
        raise ParameterError("pochhammer order must be >= 0")
    out = 1.0 + 0.0j
    a = complex(a)
    for j in range(n):
        out *= a + j
    return out


def _nonpositive_int(x: complex) -> int | None:
    """Return ``-x`` if ``x`` is a non-positive integer (within 1e-12), else None."""
    if abs(x.imag) > POLE_TOL:
        return None
    r = round(x.real)
    if r <= 0 and abs(x.real - r) < POLE_TOL:
        return -int(r)
    return None


def hyp2f1(a, b, c, z, ctl: SeriesControl = DEFAULT_SERIES) -> complex:
    """Gauss hypergeometric function by its power series.

    Terminating series (``a`` or ``b`` in ``{0, -1, -2, ...}``) are summed
    over their finite support for any ``z``. Otherwise ``|z| < 1`` is
    required, except ``z == 1`` with ``Re(c - a - b) > 0`` which is
    Gauss's summation theorem. The series stops once three consecutive
    terms fall below ``rel_tol`` relative to the running sum.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    na, nb = _nonpositive_int(a), _nonpositive_int(b)
    cands = [n for n in (na, nb) if n is not None]
    n_term = min(cands) if cands else None
    nc = _nonpositive_int(c)

    if n_term is not None:
        if nc is not None and n_term > nc:
            raise ParameterError(f"c={c!r} is a pole of the terminating series of length {n_term}")
        total = 1.0 + 0.0j
        term = 1.0 + 0.0j
        for q in range(n_term):
            term *= (a + q) * (b + q) / ((c + q) * (q + 1)) * z
            total += term
        return total

    if nc is not None:
        raise ParameterError(f"c={c!r} is a non-positive integer in a non-terminating series")
    if z == 1.0:
        if (c - a - b).real <= 0:
            raise ParameterError("F(a,b;c;1) diverges unless Re(c-a-b) > 0")
        return complex(gamma_ratio([c, c - a - b], [c - a, c - b]))
    if abs(z) >= 1.0:
        raise ParameterError(f"|z|={abs(z)!r} outside the disc of convergence")

    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    small = 0
    for q in range(ctl.max_terms):
        term *= (a + q) * (b + q) / ((c + q) * (q + 1)) * z
        total += term
        if abs(term) <= ctl.rel_tol * abs(total):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
    raise ConvergenceError(f"2F1({a}, {b}; {c}; {z}) not converged after {ctl.max_terms} terms")


def hyp2f1_connect(a, b, c, z, ctl: SeriesControl = DEFAULT_SERIES) -> complex:
    """2F1 through the ``z -> 1/(1-z)`` connection formula.

    ``F(a,b;c;z) = (1-z)^-a G(c)G(b-a)/(G(b)G(c-a)) F(a, c-b; a-b+1; 1/(1-z))
                 + (1-z)^-b G(c)G(a-b)/(G(a)G(c-b)) F(b, c-a; b-a+1; 1/(1-z))``

    Complex powers use the principal branch. Singular when ``a - b`` is an
    integer (for the scattering use ``a - b = 2ik``, i.e. excluded only for
    imaginary ``k`` with ``2ik`` integer); raises :class:`DegenerateError`.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    d = a - b
    if abs(d.imag) < DEGENERATE_TOL and abs(d.real - round(d.real)) < DEGENERATE_TOL:
        raise DegenerateError(f"a - b = {d!r} is an integer")
    one_minus = 1.0 - z
    if one_minus == 0:
        raise ParameterError("connection formula undefined at z = 1")
    w = 1.0 / one_minus
    log_om = cmath.log(one_minus)

    total = 0.0j
    coef1 = gamma_ratio([c, b - a], [b, c - a])
    if coef1 != 0:
        total += cmath.exp(-a * log_om) * coef1 * hyp2f1(a, c - b, a - b + 1, w, ctl)
    coef2 = gamma_ratio([c, a - b], [a, c - b])
    if coef2 != 0:
        total += cmath.exp(-b * log_om) * coef2 * hyp2f1(b, c - a, b - a + 1, w, ctl)
    return total
