"""Tests for the linear independence parameter and brute-force net checks."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rednets as rn
from rednets.quality import EnumerationBudgetError, compositions


def reduced_pascal(m, w2):
    net = rn.pascal_net(2, m, 2)
    sched = rn.ReductionSchedule.explicit([0, w2])
    return rn.column_reduce(net, sched), sched


# --- compositions ----------------------------------------------------------


def test_compositions_order_loads_last_coordinate_first():
    got = list(compositions(2, 2))
    assert got == [(0, 2), (1, 1), (2, 0)]
    assert sum(1 for _ in compositions(5, 3)) == 21


# --- rho -------------------------------------------------------------------


def test_rho_pascal_full():
    assert rn.rho(rn.pascal_net(2, 4, 2)) == 4


def test_rho_reduced_pascal():
    red, _ = reduced_pascal(4, 1)
    assert rn.rho(red) == 3


def test_rho_single_zero_matrix():
    red, _ = reduced_pascal(4, 4)
    assert rn.rho(red, (2,)) == 0


def test_rho_respects_budget():
    net = rn.random_net(2, 10, 8, seed=0)
    with pytest.raises(EnumerationBudgetError):
        rn.rho(net, budget=100)


def test_rho_rejects_empty_subset():
    with pytest.raises(ValueError):
        rn.rho(rn.pascal_net(2, 3, 2), ())


# --- theorem bounds --------------------------------------------------------


def test_theorem_bounds_paper_example():
    b = rn.theorem_bounds(0, 4, rn.ReductionSchedule.explicit([0, 1]), (2,))
    assert (b.lower, b.upper, b.t_upper) == (3, 3, 1)


def test_theorem_bounds_clamps():
    b = rn.theorem_bounds(2, 3, rn.ReductionSchedule.explicit([0, 5]))
    assert (b.lower, b.upper, b.t_upper) == (0, 0, 3)


def test_theorem_bounds_arithmetic():
    b = rn.theorem_bounds(2, 8, rn.ReductionSchedule.explicit([0, 3]))
    assert (b.lower, b.upper, b.t_upper) == (3, 5, 5)
    assert b.strict_upper == 5  # 8 - max(2, 3)


# --- verify_tms_net / strict_t ----------------------------------------------


def test_verify_pascal_is_0_4_2_net():
    pts = rn.generate_points(rn.pascal_net(2, 4, 2))
    assert rn.verify_tms_net(pts, 0)


def test_verify_reduced_pascal_is_strict_1_4_2_net():
    red, _ = reduced_pascal(4, 1)
    pts = rn.generate_points(red)
    assert not rn.verify_tms_net(pts, 0)
    assert rn.verify_tms_net(pts, 1)


def test_verify_t_equals_m_is_always_true():
    net = rn.random_net(2, 3, 3, seed=77)
    pts = rn.generate_points(net)
    assert rn.verify_tms_net(pts, 3)


def test_verify_propagation_rule():
    net = rn.random_net(2, 4, 2, seed=5)
    pts = rn.generate_points(net)
    t = rn.strict_t(pts)
    for v in range(t, 5):
        assert rn.verify_tms_net(pts, v)


def test_strict_t_examples():
    assert rn.strict_t(rn.generate_points(rn.pascal_net(2, 4, 2))) == 0
    red, _ = reduced_pascal(4, 1)
    assert rn.strict_t(rn.generate_points(red)) == 1


def test_strict_t_lower_sharp_construction():
    # prepended-zero-columns net with t = 1, m = 4, w = (0, 1)
    d1, d2 = rn.pascal_net(2, 4, 2).matrices
    net = rn.prepend_zero_columns_seq(d1, d2, 1, 4)
    sched = rn.ReductionSchedule.explicit([0, 1])
    red = rn.column_reduce(net, sched)
    assert rn.rho(red) == 2  # m - t - w2 exactly
    assert rn.strict_t(rn.generate_points(red)) == 4 - 2


def test_verify_budget_guard():
    pts = rn.generate_points(rn.random_net(2, 8, 6, seed=1))
    with pytest.raises(EnumerationBudgetError):
        rn.verify_tms_net(pts, 0, budget=10)


def test_verify_needs_full_block():
    net = rn.pascal_net(2, 4, 2)
    partial = rn.generate_points(net, first_digits=2)
    with pytest.raises(ValueError):
        rn.verify_tms_net(partial, 0)


# --- verify_tmes_net ---------------------------------------------------------


def test_tmes_reduced_pascal_e23():
    red, _ = reduced_pascal(4, 1)
    pts = rn.generate_points(red)
    assert rn.verify_tmes_net(pts, 0, (2, 3))


def test_tmes_reduced_pascal_e11_fails():
    red, _ = reduced_pascal(4, 1)
    pts = rn.generate_points(red)
    assert not rn.verify_tmes_net(pts, 0, (1, 1))


def test_tmes_single_solution_shape():
    # e = (m - t, k) with gcd(k, m - t) = 1 and 1 < k < m - t admits only
    # d = (1, 0), so the check reduces to the unreduced first coordinate
    red, _ = reduced_pascal(4, 1)
    pts = rn.generate_points(red)
    assert rn.verify_tmes_net(pts, 1, (3, 2))


def test_tmes_vacuous_when_no_solutions():
    red, _ = reduced_pascal(4, 1)
    pts = rn.generate_points(red)
    # 5 d1 + 7 d2 = 4 has no nonnegative solutions
    assert rn.verify_tmes_net(pts, 0, (5, 7))


def test_tmes_validates_shape_vector():
    pts = rn.generate_points(rn.pascal_net(2, 3, 2))
    with pytest.raises(ValueError):
        rn.verify_tmes_net(pts, 0, (1,))
    with pytest.raises(ValueError):
        rn.verify_tmes_net(pts, 0, (0, 1))


# --- sandwich and consistency properties -------------------------------------


@pytest.mark.parametrize("m", range(1, 7))
def test_theorem_sandwich_pascal(m):
    net = rn.pascal_net(2, m, 2)
    for w2 in range(m + 1):
        sched = rn.ReductionSchedule.explicit([0, w2])
        red = rn.column_reduce(net, sched)
        r = rn.rho(red)
        bounds = rn.theorem_bounds(0, m, sched)
        assert bounds.lower <= r <= bounds.upper
        # t = 0 case gives equality and strict t equal to w2
        assert r == max(0, m - w2)
        assert rn.strict_t(rn.generate_points(red)) == min(w2, m)


@pytest.mark.parametrize("m", range(1, 7))
def test_theorem_sandwich_holds_per_projection(m):
    net = rn.pascal_net(2, m, 2)
    base_pts = rn.generate_points(net)
    t_map = {u: rn.strict_t(base_pts, u) for u in [(1,), (2,), (1, 2)]}
    for w2 in range(m + 1):
        sched = rn.ReductionSchedule.explicit([0, w2])
        red = rn.column_reduce(net, sched)
        for u, t_u in t_map.items():
            bounds = rn.theorem_bounds(t_u, m, sched, u)
            r = rn.rho(red, u)
            assert bounds.lower <= r <= bounds.upper, (m, w2, u)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(1, 3), st.integers(0, 10**6))
def test_strict_t_equals_m_minus_rho_for_digital_nets(m, s, seed):
    net = rn.random_net(2, m, s, seed=seed)
    r = rn.rho(net)
    t = rn.strict_t(rn.generate_points(net))
    assert t <= m - r  # net property from the rank condition
    assert r >= m - t  # rank condition from the net property
    assert t == m - r


# --- report ------------------------------------------------------------------


def test_analyze_reduced_pascal_report():
    net = rn.pascal_net(2, 4, 2)
    sched = rn.ReductionSchedule.explicit([0, 1])
    report = rn.analyze(net, sched)
    assert report.rho == 3
    assert report.t_exact == 1
    assert report.t_upper == 1
    assert report.projections[(1,)].rho == 4
    assert report.projections[(1,)].t_exact == 0
    assert report.projections[(2,)].rho == 3
    assert report.projections[(2,)].t_exact == 1
    assert report.projections[(2,)].t_upper == 1
    assert report.projections[(1, 2)].rho == 3
    # rho >= m - t always
    assert report.rho >= report.m - report.t_exact


def test_report_json_schema_and_determinism():
    net = rn.pascal_net(2, 3, 2)
    sched = rn.ReductionSchedule.explicit([0, 1])
    r1 = rn.analyze(net, sched).to_json()
    r2 = rn.analyze(net, sched).to_json()
    assert r1 == r2
    payload = json.loads(r1)
    assert set(payload) == {"base", "m", "s", "rho", "t_exact", "t_upper", "projections"}
    assert set(payload["projections"]) == {"1", "2", "1,2"}
    assert set(payload["projections"]["1,2"]) == {"rho", "t_exact", "t_upper"}
