"""Acceptance criteria, each a single test with its tolerance and runtime budget.

Run ``pytest tests/test_acceptance.py`` to get one pass/fail line per
criterion in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from xmjacobi.orthopoly import gram_matrix, norm_h, pmn_via_ab, xm_jacobi
from xmjacobi.params import FamilyParams
from xmjacobi.potential import (
    bound_energies,
    count_nodes,
    eigenfunction_spec,
    eigenfunction_value,
    schrodinger_residual,
    shape_invariance_residual,
)
from xmjacobi.radial_oracle import shoot_bound_states, verify_s_matrix
from xmjacobi.scattering import (
    asymptotic_coeffs_x2,
    asymptotic_coeffs_xm,
    bound_state_poles,
    bracket_factor,
    bracket_singularities,
    s_from_coefficients,
    s_gpt,
    s_xm,
)

SWEEP_SETS = [(1.0, 12.0), (2.0, 13.5), (0.5, 11.7)]  # admit m up to 5
SMALL_SETS = [(1.0, 10.0), (2.0, 9.0), (0.5, 8.5)]
K_SWEEP = np.linspace(0.01, 10.0, 1000)
HEADLINE_KS = [0.5, 1.0, 2.0, 4.0]


def _admissible(sets, ms):
    return [FamilyParams(g, h, m) for g, h in sets for m in ms if h - g > 2 * m]


class Clock:
    def __init__(self, record_property, budget):
        self.record, self.budget = record_property, budget
        self.t0 = time.perf_counter()

    def finish(self, detail):
        elapsed = time.perf_counter() - self.t0
        self.record("elapsed", elapsed)
        self.record("detail", detail)
        assert elapsed < self.budget, f"runtime {elapsed:.2f} s exceeds {self.budget} s"


@pytest.fixture
def clock(request, record_property):
    return Clock(record_property, request.node.get_closest_marker("criterion").args[2])


@pytest.mark.criterion(1, "m=0 reduction to GPT", 1)
def test_c01_m0_reduction(clock):
    worst = 0.0
    for g, h in SWEEP_SETS:
        p = FamilyParams(g, h, 0)
        worst = max(worst, float(np.max(np.abs(s_xm(p, K_SWEEP) - s_gpt(p.A, p.B, K_SWEEP)))))
    clock.finish(f"max |S_xm - S_GPT| = {worst:.1e} (tol 1e-12)")
    assert worst < 1e-12


@pytest.mark.criterion(2, "unitarity m=0..5", 5)
def test_c02_unitarity(clock):
    worst = 0.0
    params = _admissible(SWEEP_SETS, range(6))
    assert len(params) == 18
    for p in params:
        worst = max(worst, float(np.max(np.abs(np.abs(s_xm(p, K_SWEEP)) - 1))))
    clock.finish(f"max ||S|-1| = {worst:.1e} over {len(params)} families (tol 1e-10)")
    assert worst < 1e-10


@pytest.mark.criterion(3, "route equivalence m=2", 1)
def test_c03_route_equivalence(clock):
    rng = np.random.default_rng(2024)
    ks = rng.uniform(0.01, 10.0, 50)
    worst = 0.0
    for g, h in SMALL_SETS[:1] + SWEEP_SETS:
        p = FamilyParams(g, h, 2)
        closed = s_xm(p, ks)
        via_q = s_from_coefficients(asymptotic_coeffs_xm(p, ks), ks, "q")
        via_p = s_from_coefficients(asymptotic_coeffs_x2(p, ks), ks, "p")
        worst = max(worst, *(float(np.max(np.abs(x - y))) for x, y in ((via_q, closed), (via_p, closed), (via_p, via_q))))
    clock.finish(f"max route disagreement = {worst:.1e} (tol 1e-11)")
    assert worst < 1e-11


@pytest.mark.criterion(4, "Numerov phase shift cross-validation", 30)
def test_c04_ode_cross_validation(clock):
    worst = 0.0
    for m in (0, 1, 2):
        worst = max(worst, verify_s_matrix(FamilyParams(1, 10, m), HEADLINE_KS).max_diff)
    control = verify_s_matrix(FamilyParams(1, 10, 2), HEADLINE_KS, analytic_params=FamilyParams(1, 10, 1))
    clock.finish(f"max phase diff = {worst:.1e} rad (tol 1e-3), negative control = {control.max_diff:.2f} rad (> 1e-2)")
    assert worst < 1e-3
    assert control.max_diff > 1e-2


@pytest.mark.criterion(5, "spectrum by shooting", 60)
def test_c05_spectrum(clock):
    worst, count = 0.0, 0
    for m in (0, 1, 2):
        p = FamilyParams(1, 10, m)
        found = shoot_bound_states(p)
        targets = [-((p.A - nu) ** 2) for nu in p.bound_indices()]
        assert len(targets) == math.floor(p.nu_B - m) + 1
        assert [e.energy_scattering for e in bound_energies(p)] == targets
        assert len(found) == len(targets), f"m={m}: found {len(found)} levels, expected {len(targets)}"
        worst = max(worst, float(np.max(np.abs(np.array(found) - targets))))
        count += len(found)
    clock.finish(f"max |E - E_exact| = {worst:.1e} over {count} levels (tol 1e-6)")
    assert worst < 1e-6


@pytest.mark.criterion(6, "shape invariance m=0..3", 1)
def test_c06_shape_invariance(clock):
    r = np.linspace(0.1, 10.0, 2000)
    params = _admissible(SMALL_SETS, range(4))
    worst = max(float(np.max(np.abs(shape_invariance_residual(p, r)))) for p in params)
    clock.finish(f"max residual = {worst:.1e} (tol 1e-8)")
    assert worst < 1e-8


@pytest.mark.criterion(7, "eigenfunction residual and nodes m<=2", 10)
def test_c07_eigenfunction_residual(clock):
    worst, bad_nodes, n = 0.0, [], 0
    r = np.linspace(1e-3, 20.0, 20000)
    for p in _admissible(SMALL_SETS, range(3)):
        for nu in p.bound_indices():
            spec = eigenfunction_spec(p, nu)
            worst = max(worst, schrodinger_residual(spec))
            if count_nodes(eigenfunction_value(spec, r)) != nu:
                bad_nodes.append((p.as_dict(), nu))
            n += 1
    clock.finish(f"max relative residual = {worst:.1e} over {n} states (tol 1e-5), node mismatches = {len(bad_nodes)}")
    assert worst < 1e-5
    assert not bad_nodes


@pytest.mark.criterion(8, "orthogonality and norms", 20)
def test_c08_orthogonality(clock):
    leak, diag = 0.0, 0.0
    for p in _admissible(SMALL_SETS, range(4)):
        gram, _ = gram_matrix(p)
        d = np.sqrt(np.diag(gram))
        leak = max(leak, float(np.max(np.abs(gram / np.outer(d, d) - np.eye(len(d))))))
        closed = np.array([norm_h(nu, p) for nu in p.bound_indices()])
        diag = max(diag, float(np.max(np.abs(np.diag(gram) / closed - 1))))
    clock.finish(f"max leakage = {leak:.1e}, max diagonal error = {diag:.1e} (tol 1e-8)")
    assert leak < 1e-8
    assert diag < 1e-8


@pytest.mark.criterion(9, "dual polynomial construction m=1..3", 1)
def test_c09_dual_construction(clock):
    y = np.linspace(1.05, 30.0, 50)
    worst = 0.0
    for p in _admissible(SMALL_SETS, (1, 2, 3)):
        for nu in range(p.nu_max + 1):
            ratio = xm_jacobi(nu, p)(y) / pmn_via_ab(nu, p)(y)
            worst = max(worst, float(np.std(ratio) / abs(np.mean(ratio))))
    clock.finish(f"max ratio spread = {worst:.1e} (tol 1e-9)")
    assert worst < 1e-9


@pytest.mark.criterion(10, "pole structure", 5)
def test_c10_pole_structure(clock):
    weakest, extra = math.inf, []
    for p in _admissible(SMALL_SETS[:1] + SWEEP_SETS, range(6)):
        for kappa in bound_state_poles(p):
            for phase in np.linspace(0, 2 * np.pi, 8, endpoint=False):
                weakest = min(weakest, abs(s_xm(p, 1j * kappa + 1e-4 * np.exp(1j * phase))))
        if p.m == 0:
            continue
        # poles of S_xm in 0 < Im k < A beyond those of S_GPT can only come
        # from the m-dependent bracket
        sing = bracket_singularities(p)
        extra += [kap for kap in sing["poles"] if 0 < kap < p.A]
        kap = np.linspace(1e-3, p.A - 1e-3, 5000)
        if np.max(np.abs(bracket_factor(p, 1j * kap))) > 1e3:
            extra.append(p.as_dict())
    clock.finish(f"min |S| within 1e-4 of bound poles = {weakest:.1e} (> 1e3), additional poles = {len(extra)}")
    assert weakest > 1e3
    assert not extra
