"""Numerov ground truth for the closed forms.

Integrates ``-psi'' + (V_hat(r) - A**2) psi = E psi`` in the rescaled
coordinate, so continuum energies are ``k**2`` and bound energies are
``-(A - nu)**2``. The regular solution starts as ``r**s`` with ``s = g + m``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import ConvergenceError, GridError, IllConditionedError, NoBracketError, ParameterError, PlateauError
from .params import FamilyParams
from .potential import count_nodes, potential_scattering
from .scattering import phase_shift, s_xm, unwrap_phase

PLATEAU_TOL = 1e-10
MAX_CONDITION = 100.0
INDICIAL_TOL = 0.05
# keep h**2 |f| / 12 below this at the first grid point
NUMEROV_STABILITY = 0.5


@dataclass(frozen=True)
class RadialGrid:
    r_min: float = 1e-3
    r_max: float = 35.0
    step: float = 1e-3

    def __post_init__(self):
        if not (self.r_min > 0 and self.step > 0 and self.r_max > self.r_min):
            raise GridError("need 0 < r_min < r_max and step > 0")
        n = (self.r_max - self.r_min) / self.step
        if abs(n - round(n)) > 1e-6 * max(1.0, n):
            raise GridError("(r_max - r_min)/step must be an integer")
        if round(n) < 100:
            raise GridError("grid needs at least 100 steps")

    @property
    def count(self) -> int:
        return int(round((self.r_max - self.r_min) / self.step)) + 1

    def points(self) -> np.ndarray:
        return self.r_min + self.step * np.arange(self.count)

    def as_dict(self) -> dict:
        return {"r_min": self.r_min, "r_max": self.r_max, "step": self.step}


def default_grid(params: FamilyParams, step: float = 1e-3, r_max: float = 35.0) -> RadialGrid:
    """Grid starting at ``r_min = 1e-3`` unless the centrifugal-like ``s(s-1)/r**2``
    term would make the first Numerov coefficient too large."""
    s = params.indicial_exponent
    r_min = 1e-3
    need = step * math.sqrt(max(s * (s - 1), 0.0) / (12 * NUMEROV_STABILITY))
    if need > r_min:
        r_min = step * math.ceil(need / step)
    n = round((r_max - r_min) / step)
    return RadialGrid(r_min, r_min + n * step, step)


@dataclass
class GridFunction:
    grid: RadialGrid
    values: np.ndarray
    rescalings: int = 0

    def __post_init__(self):
        if len(self.values) != self.grid.count:
            raise GridError("values length does not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ConvergenceError("non-finite values in grid function")

    def nodes(self) -> int:
        return count_nodes(self.values)

    def at(self, index: int) -> float:
        return float(self.values[index])


def _check_window(grid: RadialGrid, exponent: float):
    if exponent * math.log10(grid.r_min) < -280:
        raise GridError("r_min**s underflows; increase r_min")


def indicial_slope(psi: GridFunction, points: int = 10) -> float:
    """Log-log slope of ``|psi|`` over the first ``points`` grid points."""
    r = psi.grid.points()[:points]
    v = np.abs(psi.values[:points])
    if np.any(v == 0):
        return float("nan")
    return float(np.polyfit(np.log(r), np.log(v), 1)[0])


def numerov_integrate(
    params: FamilyParams,
    E: float,
    grid: RadialGrid | None = None,
    potential=None,
    exponent: float | None = None,
    check_indicial: bool = True,
    start: str = "series",
) -> GridFunction:
    """Outward Numerov solution regular at the origin.

    ``potential`` replaces ``V_hat - A**2`` (callable of ``r`` or an array on
    the grid), and ``exponent`` replaces ``s = g + m``; both exist for test
    problems. The prefix is rescaled whenever ``|psi| > 1e150``.

    ``start="power"`` seeds with ``r**s`` at the first two points;
    ``start="series"`` (default) adds the next term of the regular solution,
    ``r**s (1 + c2 r**2)``, which removes an O(r_min**2) seed error that
    otherwise shows up at the 1e-7 level in energies and phases.
    """
    grid = grid or default_grid(params)
    s = params.indicial_exponent if exponent is None else exponent
    _check_window(grid, s)
    r = grid.points()
    if potential is None:
        v = potential_scattering(params, r)
    elif callable(potential):
        v = np.asarray(potential(r), dtype=float)
    else:
        v = np.asarray(potential, dtype=float)
    f = v - E
    psi = np.zeros_like(r)
    psi[0], psi[1] = _seed(r, v, E, s, start)
    n = _kernels.numerov(f, psi, grid.step**2)
    out = GridFunction(grid, psi, n)
    if check_indicial and potential is None:
        slope = indicial_slope(out)
        if not abs(slope - s) < INDICIAL_TOL:
            raise ConvergenceError(f"indicial slope {slope:.4f} inconsistent with s={s}")
    return out


def _seed(r, v, E, s, start):
    """First two values of the regular solution."""
    if start == "power":
        return r[0] ** s, r[1] ** s
    if start != "series":
        raise ParameterError(f"unknown start {start!r}")
    # V = s(s-1)/r**2 + V0 + O(r**2) for the even potentials here
    v0 = v[0] - s * (s - 1) / r[0] ** 2
    c2 = (v0 - E) / (4 * s + 2)
    return r[0] ** s * (1 + c2 * r[0] ** 2), r[1] ** s * (1 + c2 * r[1] ** 2)


def _inward(f: np.ndarray, kappa: float, step: float) -> np.ndarray:
    """Solution decaying at ``r_max``, integrated from the outer edge."""
    rev = np.ascontiguousarray(f[::-1])
    psi = np.zeros_like(rev)
    psi[0], psi[1] = 1.0, math.exp(kappa * step)
    _kernels.numerov(rev, psi, step**2)
    return psi[::-1]


def _match_index(v: np.ndarray, E: float) -> int:
    """Outermost classical turning point (index), clipped to the interior."""
    allowed = np.nonzero(v < E)[0]
    idx = int(allowed[-1]) if allowed.size else len(v) // 2
    return min(max(idx, 2), len(v) - 3)


def _mismatch(params, grid, v, E, c):
    out = np.zeros_like(v)
    out[0], out[1] = _seed(grid.points(), v, E, params.indicial_exponent, "series")
    f = v - E
    _kernels.numerov(f, out, grid.step**2)
    inn = _inward(f, math.sqrt(max(-E, 0.0)), grid.step)
    a0, a1, b0, b1 = out[c], out[c + 1], inn[c], inn[c + 1]
    return (a0 * b1 - a1 * b0) / (math.hypot(a0, a1) * math.hypot(b0, b1))


def bound_state_solution(params: FamilyParams, E: float, grid: RadialGrid | None = None) -> GridFunction:
    """Outward solution up to the outermost turning point, joined to the inward one.

    Pure outward integration into the forbidden region picks up the growing
    solution at the level of the discretization error; the joined solution
    keeps the decaying tail. ``E`` should be (close to) an eigenvalue.
    """
    grid = grid or default_grid(params)
    out = numerov_integrate(params, E, grid, check_indicial=False)
    v = potential_scattering(params, grid.points())
    c = _match_index(v, E)
    inn = _inward(v - E, math.sqrt(max(-E, 0.0)), grid.step)
    if inn[c] == 0:
        raise ConvergenceError("inward solution vanishes at the matching point")
    values = np.concatenate([out.values[: c + 1], inn[c + 1 :] * (out.values[c] / inn[c])])
    return GridFunction(grid, values, out.rescalings)


def shoot_bound_states(
    params: FamilyParams,
    e_window: tuple[float, float] | None = None,
    tol: float = 1e-10,
    grid: RadialGrid | None = None,
    failures: list | None = None,
) -> list[float]:
    """Bound energies (threshold convention) inside ``e_window``, ascending.

    Levels are isolated by the node count of the outward solution (the
    number of levels below ``E``), then refined with Brent's method on the
    normalized Wronskian of outward and inward solutions at the outermost
    turning point. The default window runs from the bottom of the potential
    to just below threshold. Sub-intervals without a sign change are
    appended to ``failures`` as :class:`NoBracketError` instead of raising.
    """
    grid = grid or default_grid(params)
    r = grid.points()
    v = potential_scattering(params, r)
    if e_window is None:
        e_window = (float(v.min()), -1e-8)
    lo, hi = e_window
    if not (lo < hi <= 0):
        raise ParameterError("e_window must satisfy lo < hi <= 0")
    if not tol > 0:
        raise ParameterError("tol must be positive")

    def nodes(E):
        return numerov_integrate(params, E, grid, check_indicial=False).nodes()

    brackets = []

    def isolate(a, b, na, nb):
        if nb == na:
            return
        if nb - na == 1:
            brackets.append((a, b))
            return
        if b - a < tol:
            brackets.append((a, b))  # degenerate within tolerance; refine anyway
            return
        mid = 0.5 * (a + b)
        nm = nodes(mid)
        isolate(a, mid, na, nm)
        isolate(mid, b, nm, nb)

    isolate(lo, hi, nodes(lo), nodes(hi))

    energies = []
    for a, b in brackets:
        c = _match_index(v, 0.5 * (a + b))
        try:
            fa, fb = _mismatch(params, grid, v, a, c), _mismatch(params, grid, v, b, c)
            if fa * fb > 0:
                raise NoBracketError(a, b, "Wronskian does not change sign")
            energies.append(brentq(lambda e: _mismatch(params, grid, v, e, c), a, b, xtol=tol, rtol=1e-15))
        except NoBracketError as exc:
            if failures is not None:
                failures.append(exc)
    return sorted(energies)


# -- phase shifts --------------------------------------------------------------


@dataclass(frozen=True)
class PhaseExtraction:
    r1: float
    r2: float
    delta: float
    condition_number: float

    def __post_init__(self):
        if not self.r1 < self.r2:
            raise ParameterError("need r1 < r2")


def condition_number(k: float, r1: float, r2: float) -> float:
    s = abs(math.sin(k * (r2 - r1)))
    return math.inf if s == 0 else 1.0 / s


def choose_matching_points(params: FamilyParams, k: float, grid: RadialGrid, potential=None):
    """Indices ``(i1, i2, i3)`` in the plateau, about a quarter wavelength apart.

    ``i2`` is the last grid point; ``i3`` sits midway and is used as the
    consistency checkpoint. Raises :class:`PlateauError` when ``r1`` is not
    yet in the asymptotic region and :class:`IllConditionedError` when
    ``1/|sin(k (r2 - r1))| >= 100``.
    """
    r = grid.points()
    i2 = grid.count - 1
    span = int(round(0.5 * math.pi / k / grid.step))
    span = max(2, min(span, i2 // 4))
    i1 = i2 - span
    i3 = i2 - span // 2
    if potential is None:
        v1, v2 = potential_scattering(params, np.array([r[i1], r[i2]]))
    else:
        v1, v2 = np.asarray(potential(np.array([r[i1], r[i2]])), dtype=float)
    if not abs(v1 - v2) < PLATEAU_TOL:
        raise PlateauError(f"potential not flat between r={r[i1]:.3f} and r_max (|dV|={abs(v1 - v2):.2e})")
    cond = condition_number(k, r[i1], r[i2])
    if not cond < MAX_CONDITION:
        raise IllConditionedError(f"condition number {cond:.1f} >= {MAX_CONDITION}")
    return i1, i2, i3


def extract_phase_shift(psi: GridFunction, k: float, indices=None) -> PhaseExtraction:
    """Two-point match of ``psi ~ C sin(k r + delta)``; ``delta`` in ``(-pi/2, pi/2]``.

    ``tan(delta) = (p1 sin k r2 - p2 sin k r1) / (p2 cos k r1 - p1 cos k r2)``.
    The fit is then checked at a third point.
    """
    r = psi.grid.points()
    if indices is None:
        i2 = psi.grid.count - 1
        span = max(2, int(round(0.5 * math.pi / k / psi.grid.step)))
        indices = (i2 - span, i2, i2 - span // 2)
    i1, i2, i3 = indices
    r1, r2, r3 = r[i1], r[i2], r[i3]
    cond = condition_number(k, r1, r2)
    if not cond < MAX_CONDITION:
        raise IllConditionedError(f"condition number {cond:.1f} >= {MAX_CONDITION}")
    p1, p2, p3 = psi.values[i1], psi.values[i2], psi.values[i3]
    if p1 == 0 and p2 == 0:
        raise IllConditionedError("wavefunction vanishes at both matching points")
    num = p1 * math.sin(k * r2) - p2 * math.sin(k * r1)
    den = p2 * math.cos(k * r1) - p1 * math.cos(k * r2)
    delta = math.atan2(num, den)
    # reduce mod pi into (-pi/2, pi/2]
    delta = delta - math.pi * math.ceil(delta / math.pi - 0.5)
    # amplitude from the better-conditioned point, then check the third
    j = i1 if abs(math.sin(k * r1 + delta)) > abs(math.sin(k * r2 + delta)) else i2
    amp = psi.values[j] / math.sin(k * r[j] + delta)
    scale = max(abs(p1), abs(p2), abs(p3))
    if abs(amp * math.sin(k * r3 + delta) - p3) > 1e-6 * scale:
        raise PlateauError("two-point fit inconsistent at the checkpoint")
    return PhaseExtraction(float(r1), float(r2), float(delta), float(cond))


def circular_diff(d1: float, d2: float) -> float:
    """Distance of two phase shifts compared as ``2 delta`` on the circle, halved."""
    x = (2.0 * (d1 - d2) + math.pi) % (2.0 * math.pi) - math.pi
    return abs(x) / 2.0


def numerical_phase_shift(params: FamilyParams, k: float, grid: RadialGrid | None = None) -> PhaseExtraction:
    """Phase shift of the Numerov solution for ``params`` at wavenumber ``k``."""
    grid = grid or default_grid(params)
    psi = numerov_integrate(params, k * k, grid)
    idx = choose_matching_points(params, k, grid)
    return extract_phase_shift(psi, k, idx)


@dataclass(frozen=True)
class PhaseRecord:
    k: float
    delta_numeric: float
    delta_analytic: float
    diff: float
    condition_number: float

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "delta_numeric": self.delta_numeric,
            "delta_analytic": self.delta_analytic,
            "diff": self.diff,
            "condition_number": self.condition_number,
        }


@dataclass
class VerificationReport:
    params: FamilyParams
    grid: RadialGrid
    records: list
    analytic_params: FamilyParams

    @property
    def max_diff(self) -> float:
        return max(r.diff for r in self.records)

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "analytic_params": self.analytic_params.as_dict(),
            "grid_meta": {**self.grid.as_dict(), "backend": _kernels.BACKEND},
            "records": [r.as_dict() for r in self.records],
            "max_diff": self.max_diff,
        }


def verify_s_matrix(
    params: FamilyParams,
    k_list,
    grid: RadialGrid | None = None,
    analytic_params: FamilyParams | None = None,
    jobs: int = 1,
) -> VerificationReport:
    """Compare Numerov phase shifts with ``arg(s_xm)/2`` for each ``k >= 0.1``.

    ``analytic_params`` lets a negative control pit one family member's
    closed form against another's potential. Analytic phases are unwrapped
    by continuity from the smallest ``k``; differences use the circular
    metric, so the winding does not matter for the comparison.
    """
    ks = sorted(float(k) for k in k_list)
    if not ks:
        raise ParameterError("empty k list")
    if ks[0] < 0.1:
        raise ParameterError("phase extraction needs k >= 0.1")
    grid = grid or default_grid(params)
    ap = analytic_params or params
    analytic = unwrap_phase([phase_shift(s_xm(ap, k)) for k in ks])

    def one(k):
        return numerical_phase_shift(params, k, grid)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            numeric = list(pool.map(one, ks))
    else:
        numeric = [one(k) for k in ks]
    records = [
        PhaseRecord(k, pe.delta, float(da), circular_diff(pe.delta, da), pe.condition_number)
        for k, pe, da in zip(ks, numeric, analytic)
    ]
    return VerificationReport(params, grid, records, ap)
