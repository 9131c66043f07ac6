import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sci_integrate

from algnls.classifier import (
    _areas,
    branch_frequencies,
    classify,
    equal_area_functions,
    find_lambda2,
    lplus_kernel_check,
    window_roots,
)
from algnls.profile import energy_numeric
from algnls.spectrum_curve import critical_frequencies, energy_closed, lambda_closed, lambda_prime

from conftest import DEGENERATE, MONOTONE, WINDOW

CURVE = critical_frequencies(WINDOW)
LAMBDA2_FROZEN = 1.8265498748391347  # bisection of g2 - g1 computed offline, 1e-15 bracket


def areas_by_quad(p, lam):
    w1, w2, w3 = window_roots(p, lam)
    g1 = sci_integrate.quad(lambda w: lambda_closed(p, w) - lam, w1, w2, epsabs=0, epsrel=1e-12)[0]
    g2 = sci_integrate.quad(lambda w: lam - lambda_closed(p, w), w2, w3, epsabs=0, epsrel=1e-12)[0]
    return g1, g2


window_levels = st.floats(CURVE.lambda_m, CURVE.lambda_M).filter(
    lambda x: CURVE.lambda_m * (1 + 1e-9) < x < CURVE.lambda_M * (1 - 1e-9)
)


# --- branch frequencies ---------------------------------------------------------

def test_single_root_monotone():
    (idx, w), = branch_frequencies(MONOTONE, 58 / 15)
    assert idx == 1 and w == pytest.approx(1.0, rel=1e-14)


def test_three_roots_mid_window():
    lam = 0.5 * (CURVE.lambda_m + CURVE.lambda_M)
    roots = branch_frequencies(WINDOW, lam)
    assert [i for i, _ in roots] == [1, 2, 3]
    w1, w2, w3 = (w for _, w in roots)
    assert 0 < w1 < CURVE.omega_m < w2 < CURVE.omega_M < w3
    for w in (w1, w2, w3):
        assert lambda_closed(WINDOW, w) == pytest.approx(lam, rel=1e-14)


def test_degenerate_level_root():
    roots = branch_frequencies(DEGENERATE, critical_frequencies(DEGENERATE).lambda_d)
    assert roots == [(1, 0.25)]


@pytest.mark.parametrize("lam", [0.1, 1.0, 3.0, 10.0])
def test_branch_outside_window(lam):
    roots = branch_frequencies(WINDOW, lam)
    assert len(roots) == 1
    idx, w = roots[0]
    assert idx == (1 if lam < CURVE.lambda_m else 3)
    assert lambda_closed(WINDOW, w) == pytest.approx(lam, rel=1e-13)


def test_window_edges_merge():
    assert [i for i, _ in branch_frequencies(WINDOW, CURVE.lambda_M)] == [2, 3]
    assert [i for i, _ in branch_frequencies(WINDOW, CURVE.lambda_m)] == [1, 2]


@pytest.mark.parametrize("lam", [0.0, -1.0])
def test_nonpositive_level(lam):
    with pytest.raises(ValueError):
        branch_frequencies(MONOTONE, lam)


@given(window_levels)
def test_branch_derivative_signs(lam):
    h = 1e-7 * lam
    lo = [w for _, w in branch_frequencies(WINDOW, lam - h)]
    hi = [w for _, w in branch_frequencies(WINDOW, lam + h)]
    if len(lo) == 3 and len(hi) == 3:
        assert hi[0] > lo[0] and hi[1] < lo[1] and hi[2] > lo[2]


# --- equal areas ----------------------------------------------------------------

def test_areas_at_window_edges():
    assert equal_area_functions(WINDOW, CURVE.lambda_M)[0] == pytest.approx(0.0, abs=1e-12)
    assert equal_area_functions(WINDOW, CURVE.lambda_m)[1] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("frac", [0.2, 0.5, 0.8])
def test_areas_match_adaptive_quadrature(frac):
    lam = CURVE.lambda_m + frac * (CURVE.lambda_M - CURVE.lambda_m)
    g1, g2 = equal_area_functions(WINDOW, lam)
    q1, q2 = areas_by_quad(WINDOW, lam)
    assert g1 == pytest.approx(q1, rel=1e-9)
    assert g2 == pytest.approx(q2, rel=1e-9)


@given(window_levels)
def test_energy_difference_identities(lam):
    w1, w2, w3 = window_roots(WINDOW, lam)
    g1, g2 = _areas(WINDOW, w1, w2, w3, lam)
    e1, e2, e3 = (energy_closed(WINDOW, w) for w in (w1, w2, w3))
    scale = max(abs(e1), abs(e2), abs(e3))
    assert e3 - e1 == pytest.approx(0.5 * (g1 - g2), abs=1e-10 * scale)
    assert e2 - e1 == pytest.approx(0.5 * g1, abs=1e-10 * scale)
    assert e3 - e2 == pytest.approx(-0.5 * g2, abs=1e-10 * scale)


def test_lambda2_unique_sign_change():
    lams = np.linspace(CURVE.lambda_m, CURVE.lambda_M, 102)[1:-1]
    diff = np.array([np.subtract(*equal_area_functions(WINDOW, x)[::-1]) for x in lams])
    changes = np.count_nonzero(np.diff(np.sign(diff)) != 0)
    assert changes == 1
    assert diff[0] < 0 < diff[-1]


def test_lambda2_value():
    lam2 = find_lambda2(WINDOW)
    assert lam2 == pytest.approx(LAMBDA2_FROZEN, rel=1e-13)
    assert CURVE.lambda_m < lam2 < CURVE.lambda_M
    g1, g2 = equal_area_functions(WINDOW, lam2)
    assert abs(g1 - g2) <= 1e-10 * lam2


def test_lambda2_requires_window():
    with pytest.raises(ValueError, match="no multiplicity window"):
        find_lambda2(MONOTONE)


def test_equal_energies_at_lambda2():
    lam2 = find_lambda2(WINDOW)
    w1, w2, w3 = window_roots(WINDOW, lam2)
    e1, e2, e3 = (energy_closed(WINDOW, w) for w in (w1, w2, w3))
    assert e1 == pytest.approx(e3, rel=1e-9)
    assert e1 < e2 and e3 < e2
    n1, n3 = energy_numeric(WINDOW, w1), energy_numeric(WINDOW, w3)
    assert n1 == pytest.approx(n3, rel=1e-5)


# --- classification -------------------------------------------------------------

@given(st.floats(1e-3, 1e3))
def test_monotone_classification(lam):
    rep = classify(MONOTONE, lam)
    assert rep.minimizer_count == 1
    assert not rep.degenerate_minimum


def test_monotone_example():
    rep = classify(MONOTONE, 3.8666667)
    assert rep.minimizer_count == 1
    assert rep.frequencies[0] == pytest.approx(1.0, abs=1e-7)


def test_degenerate_classification():
    lam_d = lambda_closed(DEGENERATE, 0.25)
    rep = classify(DEGENERATE, lam_d)
    assert rep.minimizer_count == 1
    assert rep.frequencies == [0.25]
    assert rep.degenerate_minimum


def test_two_minimizers_at_lambda2():
    rep = classify(WINDOW, find_lambda2(WINDOW))
    assert rep.minimizer_count == 2
    assert rep.minimizing_branches == (1, 3)
    assert rep.distance_to_lambda2 == 0.0


@pytest.mark.parametrize("offset, branch", [(1e-6, 3), (-1e-6, 1)])
def test_near_lambda2(offset, branch):
    lam2 = find_lambda2(WINDOW)
    rep = classify(WINDOW, lam2 * (1 + offset))
    assert rep.minimizer_count == 1
    assert rep.minimizing_branches == (branch,)
    i = [b for b, _ in rep.branch_freqs].index(branch)
    others = [e for j, e in enumerate(rep.energies) if j != i]
    assert all(rep.energies[i] < e for e in others)


@given(st.floats(0.05, 20.0))
def test_count_bound(lam):
    rep = classify(WINDOW, lam)
    assert rep.minimizer_count in (1, 2)
    # the minimizer has the lowest energy among the candidates
    idx = [b for b, _ in rep.branch_freqs]
    best = min(rep.energies)
    for b in rep.minimizing_branches:
        assert rep.energies[idx.index(b)] <= best + 1e-12 * abs(best)


# --- constrained Hessian --------------------------------------------------------

@pytest.mark.parametrize(
    "p, omega, L, expected",
    [(DEGENERATE, 0.25, 80.0, True), (DEGENERATE, 1.0, 40.0, False), (MONOTONE, 1.0, None, False),
     (WINDOW, CURVE.omega_m, None, True), (WINDOW, 2.0, None, False)],
    ids=["deg-wd", "deg-1", "mono-1", "window-wm", "window-2"],
)
def test_hessian_agrees_with_slope_criterion(p, omega, L, expected):
    chk = lplus_kernel_check(p, omega, n=4096, L=L)
    assert chk.degenerate is expected
    assert (abs(lambda_prime(p, omega)) <= 1e-10) is expected
