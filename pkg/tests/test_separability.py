import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xstates.orbits import OrderedSpectrum, compose_rows, diagonalize_rows
from xstates.separability import (
    ZETA_CRITICAL,
    Binding,
    OracleDisagreement,
    absolute_slacks,
    absolutely_separable,
    angle_independence_check,
    critical_ratio,
    degenerate_bound,
    degenerate_criterion,
    degenerate_cross_check,
    degenerate_discrepancy_grid,
    elementwise_slacks_rows,
    ineq_spectrum_angles,
    partial_transpose,
    ppt_elementwise,
    ppt_oracle,
    pt_min_eigenvalue_closed_rows,
    pt_min_eigenvalue_rows,
    spectrum_angle_slacks,
    werner_threshold,
)
from xstates.state import BELL_PHI_PLUS, MAXIMALLY_MIXED, XState, make_xstate, werner_state

from conftest import polar, spectra, xstates


def pt_by_loops(m):
    """Partial transpose on qubit 2 by explicit index bookkeeping."""
    out = np.zeros_like(m)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    out[2 * i + j, 2 * k + l] = m[2 * i + l, 2 * k + j]
    return out


def test_partial_transpose_matches_loops(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.array_equal(partial_transpose(m), pt_by_loops(m))
    stack = rng.normal(size=(3, 4, 4))
    assert np.array_equal(partial_transpose(stack)[1], pt_by_loops(stack[1]))


def test_oracle_examples():
    res = ppt_oracle(MAXIMALLY_MIXED)
    assert res.min_eigenvalue == pytest.approx(0.25, abs=1e-15) and res.separable
    res = ppt_oracle(BELL_PHI_PLUS)
    assert res.min_eigenvalue == pytest.approx(-0.5, abs=1e-15) and not res.separable
    res = ppt_oracle(werner_state(1 / 3))
    assert abs(res.min_eigenvalue) <= 1e-15 and res.separable


def test_oracle_raises_on_route_disagreement(monkeypatch):
    import xstates.separability as sep

    monkeypatch.setattr(sep, "pt_min_eigenvalue_closed_rows", lambda rows: np.array([1.0]))
    with pytest.raises(OracleDisagreement):
        sep.ppt_oracle(BELL_PHI_PLUS)


def test_elementwise_examples():
    v = ppt_elementwise(BELL_PHI_PLUS)
    assert not v.separable and v.margin == -0.25 and v.binding is Binding.SECOND
    product = make_xstate([0.7 * 0.6, 0.7 * 0.4, 0.3 * 0.6, 0.3 * 0.4])
    v = ppt_elementwise(product)
    assert v.separable and v.margin >= 0 and v.binding is Binding.NONE
    p = 0.2
    v = ppt_elementwise(werner_state(p))
    assert v.separable
    assert v.margin == pytest.approx((1 - p) ** 2 / 16 - p ** 2 / 4, abs=1e-15)


def test_binding_both_and_marginal():
    x = XState.unchecked([0.5, 0, 0, 0.5], 0.5, 0.6)
    assert ppt_elementwise(x).binding is Binding.BOTH
    x = make_xstate([0.25, 0.25, 0.25, 0.25], 0.25 + 1e-12, 0)
    v = ppt_elementwise(x)
    assert v.marginal and v.separable


def test_inequality_examples():
    v = ineq_spectrum_angles(OrderedSpectrum(0.4, 0.3, 0.2, 0.1), 0.0, 0.0)
    assert v.separable
    np.testing.assert_allclose(v.slacks, [0.49 - 0.01, 0.09 - 0.01], atol=1e-15)
    v = ineq_spectrum_angles(OrderedSpectrum(0.5, 0.45, 0.05, 0.0), math.pi / 2, 0.0)
    assert not v.separable and v.binding is Binding.SECOND
    assert v.slacks[1] == pytest.approx(0.0025 - 0.005, abs=1e-15)
    v = ineq_spectrum_angles(OrderedSpectrum(0.3, 0.3, 0.2, 0.2), 0.7, 0.7)
    assert v.separable and v.slacks == pytest.approx((0.36, 0.16))
    assert v.margin == pytest.approx(min((0.3 + 0.3) ** 2, (0.2 + 0.2) ** 2))


def test_inequalities_require_ordered_spectrum():
    with pytest.raises(ValueError):
        ineq_spectrum_angles((0.1, 0.4, 0.3, 0.2), 0, 0)


@given(spectra, polar, polar)
def test_inequalities_are_four_times_elementwise(r, p1, p2):
    rows = compose_rows(r[None], [[p1, 0.3, p2, 1.1]])
    np.testing.assert_allclose(spectrum_angle_slacks(r, p1, p2), 4 * elementwise_slacks_rows(rows), atol=1e-14)


@settings(max_examples=200)
@given(xstates())
def test_three_routes_agree(x):
    row = x.to_row()
    oracle = ppt_oracle(x)
    elem = ppt_elementwise(x)
    s, a = diagonalize_rows(row)
    ineq = ineq_spectrum_angles(OrderedSpectrum(*s[0]), a[0, 0], a[0, 2])
    if abs(oracle.min_eigenvalue) > 1e-9 and not elem.marginal and not ineq.marginal:
        assert oracle.separable == elem.separable == ineq.separable
    assert pt_min_eigenvalue_rows(row)[0] == pytest.approx(pt_min_eigenvalue_closed_rows(row)[0], abs=1e-10)


def test_angle_independence_examples():
    assert angle_independence_check((0.4, 0.3, 0.2, 0.1), 0.9, 2.1)
    assert angle_independence_check((0.25,) * 4, 1.0, 1.0)
    r = (1.0, 0.0, 0.0, 0.0)
    assert angle_independence_check(r, math.pi / 2, 0.3)
    assert not ppt_oracle(BELL_PHI_PLUS).separable


def test_absolute_separability_examples():
    v = absolutely_separable((0.25,) * 4)
    assert v.abs_separable and (v.slack1, v.slack2) == (0.25, 0.25)
    v = absolutely_separable((0.3, 0.3, 0.2, 0.2))
    assert v.abs_separable and v.slack1 == pytest.approx(0.16) and v.slack2 == pytest.approx(0.36)
    v = absolutely_separable((0.7, 0.1, 0.1, 0.1))
    assert not v.abs_separable and v.slack1 == pytest.approx(0.04 - 0.36)


@given(spectra)
def test_absolute_separability_means_every_angle_works(r):
    if not absolutely_separable(r).abs_separable:
        return
    corners = [(0, 0), (0, np.pi / 2), (np.pi / 2, 0), (np.pi / 2, np.pi / 2)]
    for p1, p2 in corners:
        assert spectrum_angle_slacks(r, p1, p2).min() >= -1e-12


def test_absolute_slacks_swap_symmetry():
    r = np.array([[0.5, 0.2, 0.2, 0.1]])
    s = absolute_slacks(r)[0]
    assert np.array_equal(absolute_slacks(r[:, [2, 3, 0, 1]])[0], s[::-1])


def test_degenerate_criterion_examples():
    bound, free = degenerate_criterion(ZETA_CRITICAL)
    assert abs(bound - 1.0) <= 1e-12
    assert degenerate_criterion(0.0) == (0.0, False)
    assert degenerate_criterion(0.5) == (1.0, True)
    assert degenerate_bound(0.5) == pytest.approx(8.0)
    for bad in (1.0, 1.5, -0.1, float("nan")):
        with pytest.raises(ValueError):
            degenerate_criterion(bad)


def test_critical_ratio_bisection():
    assert abs(critical_ratio() - (3 - 2 * math.sqrt(2))) <= 1e-9


def test_werner_threshold():
    assert abs(werner_threshold() - 1 / 3) <= 1e-9


def test_cross_check_maximally_mixed():
    rep = degenerate_cross_check(0.25, 0.25, 0.25, n_phi=19)
    assert rep.zeta == 1.0
    assert rep.criterion_separable.all() and rep.oracle_separable.all()
    assert rep.agreement_rate == 1.0 and rep.disagreement_intervals() == []


def test_cross_check_zero_ratio():
    rep = degenerate_cross_check(0.45, 0.1, 0.0, n_phi=181)
    assert rep.zeta == 0.0
    assert rep.oracle_consistent
    # the closed form admits only phi2 = pi/2, which the grid contains
    assert rep.criterion_separable.sum() == 1
    # true condition (r3 - r4)^2 sin^2 phi2 <= 4 r1^2 holds everywhere here
    assert rep.oracle_separable.all()


def test_cross_check_oracle_boundary_matches_exact_condition():
    r1, r3, r4 = 0.05, 0.8, 0.1
    rep = degenerate_cross_check(r1, r3, r4, n_phi=181)
    assert rep.oracle_consistent
    # oracle flips where (r3 - r4) sin phi2 = 2 r1
    exact = math.asin(2 * r1 / (r3 - r4))
    assert len(rep.oracle_boundaries) == 2
    assert rep.oracle_boundaries[0] == pytest.approx(exact, abs=1e-10)
    assert rep.oracle_boundaries[1] == pytest.approx(math.pi - exact, abs=1e-10)
    assert rep.criterion_boundary == pytest.approx(math.acos(math.sqrt(degenerate_bound(r4 / r3))))


def test_discrepancy_grid_is_oracle_consistent():
    grid = degenerate_discrepancy_grid([0.0, ZETA_CRITICAL, 0.5], [0.05, 0.2, 0.4], n_phi=31)
    assert len(grid) == 9
    assert all(c.oracle_consistent for c in grid)
    summary = grid[0].summary()
    assert set(summary) >= {"agreement_rate", "oracle_boundaries", "disagreements"}
    assert len(list(grid[0].rows())) == 31
