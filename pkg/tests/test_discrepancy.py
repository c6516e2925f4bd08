"""Tests for local/star discrepancy and the weighted bound machinery."""

import math
from fractions import Fraction
from itertools import combinations, product

import mpmath
import numpy as np
import pytest

import rednets as rn
from rednets.quality import EnumerationBudgetError


def slow_star_disc(points, u):
    """Independent corner-scan oracle with Fraction-exact arithmetic."""
    b, m = points.base, points.m
    full = b**m
    cols = [j - 1 for j in u]
    axes = []
    for c in cols:
        vals = sorted(set(int(v) for v in points.numerators[:, c]) | {full})
        axes.append(vals)
    pts = [
        tuple(int(points.numerators[k, c]) for c in cols)
        for k in range(points.n_points)
    ]
    best = Fraction(0)
    for corner in product(*axes):
        closed = sum(1 for p in pts if all(pc <= cc for pc, cc in zip(p, corner)))
        open_ = sum(1 for p in pts if all(pc < cc for pc, cc in zip(p, corner)))
        vol = Fraction(1)
        for cc in corner:
            vol *= Fraction(cc, full)
        best = max(best, Fraction(closed, full) - vol, vol - Fraction(open_, full))
    return best


# --- weight models ------------------------------------------------------------


def test_weight_model_parse_and_spec_round_trip():
    w = rn.WeightModel.parse("const:0.5")
    assert w.gamma(1) == 0.5 and w.gamma(7) == 0.5
    w = rn.WeightModel.parse("poly:2")
    assert w.gamma(3) == pytest.approx(1 / 9)
    w = rn.WeightModel.parse("1.0,0.5,0.25")
    assert w.gamma(2) == 0.5
    for text in ("const:2", "poly:1.5", "0.5,0.5,0.125"):
        assert rn.WeightModel.parse(rn.WeightModel.parse(text).spec()).gammas(3).tolist() == rn.WeightModel.parse(text).gammas(3).tolist()


def test_weight_model_validation():
    with pytest.raises(ValueError):
        rn.WeightModel.constant(0.0)
    with pytest.raises(ValueError):
        rn.WeightModel.explicit([0.5, 1.0])  # increasing
    with pytest.raises(ValueError):
        rn.WeightModel.explicit([1.0, -1.0])
    with pytest.raises(ValueError):
        rn.WeightModel.polynomial(2, decay_tau=2.5)
    with pytest.raises(ValueError):
        rn.WeightModel.explicit([1.0]).gamma(2)


def test_weight_model_j_zero_and_gamma_u():
    assert rn.WeightModel.constant(1.0).j_zero(5) == 0
    assert rn.WeightModel.constant(2.0).j_zero(5) == 5
    assert rn.WeightModel.explicit([3.0, 2.0, 0.5]).j_zero(3) == 2
    w = rn.WeightModel.polynomial(2)
    assert w.gamma_u((1, 2, 3)) == pytest.approx(1.0 / 36)
    assert w.gamma_u(()) == 1.0


# --- local discrepancy ----------------------------------------------------------


def test_local_discrepancy_at_one_is_zero():
    pts = rn.generate_points(rn.random_net(2, 3, 2, seed=1))
    assert rn.local_discrepancy(pts, (1, 2), (1.0, 1.0)) == pytest.approx(0.0)


def test_local_discrepancy_pascal_example():
    pts = rn.generate_points(rn.pascal_net(2, 2, 2))
    assert rn.local_discrepancy(pts, (1,), (0.5,)) == 0.0


def test_local_discrepancy_empty_block():
    empty = rn.PointBlock(2, 2, np.zeros((0, 2), dtype=np.int64))
    assert rn.local_discrepancy(empty, (1, 2), (0.5, 0.25)) == -0.125


def test_local_discrepancy_near_zero_anchor():
    # for a block with no coordinate at 0 both the count and the volume
    # vanish as the anchor shrinks
    blk = rn.PointBlock(2, 3, np.array([[1, 3], [5, 7], [2, 6]]))
    val = rn.local_discrepancy(blk, (1, 2), (1e-12, 1e-12))
    assert abs(val) <= 1e-12
    # a digital net always contains the origin, so the limit is the share
    # of points sitting at 0 in the selected coordinates
    pts = rn.generate_points(rn.random_net(2, 3, 2, seed=3))
    zeros = int(np.sum(pts.numerators[:, 0] == 0))
    val = rn.local_discrepancy(pts, (1,), (1e-12,))
    assert val == pytest.approx(zeros / 8, abs=1e-10)


def test_local_discrepancy_validates_x():
    pts = rn.generate_points(rn.pascal_net(2, 2, 2))
    with pytest.raises(ValueError):
        rn.local_discrepancy(pts, (1,), (0.0,))
    with pytest.raises(ValueError):
        rn.local_discrepancy(pts, (1,), (1.5,))
    with pytest.raises(ValueError):
        rn.local_discrepancy(pts, (), ())


# --- exact star discrepancy -------------------------------------------------------


def test_star_disc_single_point_at_zero():
    blk = rn.PointBlock(2, 0, np.array([[0]]))
    assert rn.exact_star_discrepancy(blk, (1,)) == 1.0


def test_star_disc_single_point_at_half():
    blk = rn.PointBlock(2, 1, np.array([[1]]))
    assert rn.exact_star_discrepancy(blk, (1,)) == 0.5


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_star_disc_equispaced_first_coordinate(m):
    pts = rn.generate_points(rn.pascal_net(2, m, 1))
    assert rn.exact_star_discrepancy(pts, (1,)) == 2.0**-m


def test_star_disc_permutation_invariance():
    pts = rn.generate_points(rn.random_net(2, 4, 2, seed=17))
    perm = np.random.default_rng(0).permutation(pts.n_points)
    shuffled = rn.PointBlock(2, 4, pts.numerators[perm])
    assert rn.exact_star_discrepancy(pts) == rn.exact_star_discrepancy(shuffled)


def test_star_disc_matches_fraction_oracle_random_sets():
    rng = np.random.default_rng(99)
    for _ in range(20):
        m = int(rng.integers(0, 4))
        s = int(rng.integers(1, 4))
        n = int(rng.integers(0, 9))
        blk = rn.PointBlock(2, m, rng.integers(0, 2**m, size=(n, s)))
        u = tuple(range(1, s + 1))
        got = rn.exact_star_discrepancy(blk, u)
        assert got == pytest.approx(float(slow_star_disc(blk, u)), abs=1e-15)


def test_star_disc_dominates_local_discrepancy_probes():
    pts = rn.generate_points(rn.random_net(2, 4, 3, seed=23))
    dstar = rn.exact_star_discrepancy(pts, (1, 2))
    rng = np.random.default_rng(1)
    for _ in range(200):
        x = tuple(rng.uniform(1e-9, 1.0, size=2))
        assert abs(rn.local_discrepancy(pts, (1, 2), x)) <= dstar + 1e-12


def test_star_disc_guards():
    pts = rn.generate_points(rn.random_net(2, 4, 5, seed=2))
    with pytest.raises(ValueError):
        rn.exact_star_discrepancy(pts, (1, 2, 3, 4))
    big = rn.generate_points(rn.random_net(2, 13, 1, seed=2))
    with pytest.raises(ValueError):
        rn.exact_star_discrepancy(big, (1,))
    with pytest.raises(EnumerationBudgetError):
        rn.exact_star_discrepancy(pts, (1, 2, 3), budget=10)


# --- coefficient table --------------------------------------------------------------


def test_avb_base_cases_exact():
    a = rn.avb_coefficients(2, 2)
    assert a[0] == Fraction(5, 2)
    assert a[1] == Fraction(1, 3)
    b = rn.avb_coefficients(3, 2)
    assert b[0] == Fraction(7, 2)
    assert b[1] == Fraction(1, 2)


def test_avb_positive_small_bases_and_sizes():
    for base in (2, 3, 5, 7, 11, 13):
        for size in range(2, 7):
            assert all(c > 0 for c in rn.avb_coefficients(base, size))


def test_avb_rejects_singletons():
    with pytest.raises(ValueError):
        rn.avb_coefficients(2, 1)


# --- projection bound ----------------------------------------------------------------


def test_projection_bound_cases():
    assert rn.projection_disc_bound(2, 4, 0, 2, in_sstar=False) == 1.0
    assert rn.projection_disc_bound(2, 4, 1, 1, in_sstar=True) == 0.125
    val = rn.projection_disc_bound(2, 4, 0, 2, in_sstar=True)
    assert val == pytest.approx((2.5 + 4 / 3) / 16)


# --- global bound ---------------------------------------------------------------------


def test_global_bound_paper_style_example():
    sched = rn.ReductionSchedule.explicit([0, 1])
    tmap = {(1,): 0, (2,): 0, (1, 2): 0}
    gb = rn.global_disc_bound(tmap, sched, rn.WeightModel.constant(1.0), 2, 4, 2)
    assert gb.outside is None
    assert gb.singles == pytest.approx(2 / 16)
    assert gb.higher == pytest.approx((2 / 16) * (2.5 + 4 / 3))
    assert gb.value == pytest.approx(0.4791666666666667)


def test_global_bound_scales_linearly_in_weights():
    sched = rn.ReductionSchedule.explicit([0, 1])
    tmap = {(1,): 0, (2,): 0, (1, 2): 0}
    one = rn.global_disc_bound(tmap, sched, rn.WeightModel.constant(1.0), 2, 4, 2)
    # gamma_u = c^|u| for constant weights, so terms scale by c and c^2;
    # scaling all gamma_u by c scales each term linearly
    half = rn.global_disc_bound(tmap, sched, rn.WeightModel.constant(0.5), 2, 4, 2)
    assert half.singles == pytest.approx(0.5 * one.singles)
    assert half.higher == pytest.approx(0.25 * one.higher)


def test_global_bound_with_fully_reduced_coordinate():
    # s = 3, third coordinate entirely zeroed: term (i) appears and must
    # dominate the weighted discrepancy of any subset containing it
    m = 4
    net = rn.pascal_net(2, m, 3)
    sched = rn.ReductionSchedule.explicit([0, 1, m])
    red = rn.column_reduce(net, sched)
    pts = rn.generate_points(red)
    weights = rn.WeightModel.polynomial(2)
    base_pts = rn.generate_points(net)
    tmap = {}
    for size in (1, 2):
        for u in combinations(range(1, 3), size):
            tmap[u] = rn.strict_t(base_pts, u)
    gb = rn.global_disc_bound(tmap, sched, weights, 2, m, 3)
    assert gb.outside is not None
    for size in (1, 2, 3):
        for u in combinations(range(1, 4), size):
            wdisc = weights.gamma_u(u) * rn.exact_star_discrepancy(pts, u)
            assert wdisc <= gb.value + 1e-12


def test_global_bound_missing_projection_errors():
    sched = rn.ReductionSchedule.explicit([0, 1])
    with pytest.raises(ValueError):
        rn.global_disc_bound({(1,): 0}, sched, rn.WeightModel.constant(1.0), 2, 4, 2)


# --- reduction index choosers ------------------------------------------------------------


def test_zeta_scheme_examples():
    w = rn.WeightModel.polynomial(2, decay_tau=1.5)
    sched = rn.choose_reduction_indices(w, 2, 12, 16, "zeta")
    assert sched.w[0] == 0
    assert sched.w[1] == 0  # floor(log2 2^0.5)
    assert sched.w[3] == 1  # floor(log2 4^0.5)
    assert sched.w[15] == 2  # floor(log2 16^0.5)


def test_kappa_scheme_example():
    w = rn.WeightModel.constant(1.0, kappa=17.0)
    sched = rn.choose_reduction_indices(w, 2, 12, 4, "kappa")
    assert sched.w == (0, 0, 0, 0)


def test_kappa_scheme_clamps_negative_logs():
    w = rn.WeightModel.explicit([8.0, 8.0], kappa=70.0)
    # j0 = 2, head = 64, target = sqrt(70/64) - 1 ~ 0.046; arg << 1 -> clamp
    sched = rn.choose_reduction_indices(w, 2, 6, 2, "kappa")
    assert sched.w == (0, 0)


def test_kappa_scheme_requires_valid_kappa():
    w = rn.WeightModel.constant(2.0, kappa=3.0)
    # gamma_1^j0 = 2^s for constant 2; kappa too small
    with pytest.raises(ValueError):
        rn.choose_reduction_indices(w, 2, 6, 3, "kappa")


def test_zeta_scheme_requires_poly2():
    w = rn.WeightModel.constant(1.0, decay_tau=1.5)
    with pytest.raises(ValueError):
        rn.choose_reduction_indices(w, 2, 6, 3, "zeta")


def test_kappa_criterion_product_holds_after_clamping():
    for weights, s in [
        (rn.WeightModel.polynomial(2, kappa=2.0), 50),
        (rn.WeightModel.constant(1.0, kappa=17.0), 4),
        (rn.WeightModel.explicit([2.0, 1.0, 0.25, 0.125], kappa=9.0), 4),
    ]:
        sched = rn.choose_reduction_indices(weights, 2, 10, s, "kappa")
        g = weights.gammas(s)
        prod = float(np.prod(g * (1 + 2.0 ** np.array(sched.w, dtype=float))))
        assert prod <= weights.kappa * (1 + 1e-12)


def test_unknown_scheme_rejected():
    with pytest.raises(ValueError):
        rn.choose_reduction_indices(rn.WeightModel.constant(1.0), 2, 4, 2, "nope")


# --- zeta machinery -------------------------------------------------------------------------


def test_zeta_value_against_mpmath():
    for tau in (1.2, 1.5, 1.9):
        want = float(mpmath.zeta(tau))
        assert abs(rn.zeta_value(tau) - want) <= 1e-10


def test_zeta_product_single_factor():
    w = rn.WeightModel.polynomial(2, decay_tau=1.5)
    sched = rn.ReductionSchedule.explicit([0])
    prod, bound = rn.zeta_product_check(w, sched, 2, 1)
    assert prod == pytest.approx(1 + 1.0)
    assert prod <= bound


def test_zeta_product_paper_scale():
    w = rn.WeightModel.polynomial(2, decay_tau=1.5)
    s = 10**4
    sched = rn.choose_reduction_indices(w, 2, 20, s, "zeta")
    prod, bound = rn.zeta_product_check(w, sched, 2, s)
    assert bound == pytest.approx(math.exp(2.6123753486854883), abs=1e-9)
    assert prod <= bound


def test_zeta_product_no_reduction_matches_sinh_identity():
    # prod_{j>=1} (1 + j^-2) = sinh(pi)/pi; finite s approaches from below
    w = rn.WeightModel.polynomial(2, decay_tau=1.5)
    s = 10**5
    sched = rn.ReductionSchedule.explicit([0] * s)
    prod, bound = rn.zeta_product_check(w, sched, 2, s)
    target = math.sinh(math.pi) / math.pi
    assert prod < target
    assert prod == pytest.approx(target, rel=1e-4)
    assert prod <= bound


# --- bound validity pipeline (small scale; the full sweep is acceptance) --------------------


@pytest.mark.parametrize("gamma_spec", ["const:1", "poly:2"])
def test_bound_dominates_weighted_discrepancy_small(gamma_spec):
    weights = rn.WeightModel.parse(gamma_spec)
    for m in (2, 3, 4):
        net = rn.pascal_net(2, m, 2)
        base_pts = rn.generate_points(net)
        for w2 in range(m):
            sched = rn.ReductionSchedule.explicit([0, w2])
            red = rn.column_reduce(net, sched)
            pts = rn.generate_points(red)
            tmap = {
                u: rn.strict_t(base_pts, u)
                for size in (1, 2)
                for u in combinations((1, 2), size)
            }
            gb = rn.global_disc_bound(tmap, sched, weights, 2, m, 2)
            for size in (1, 2):
                for u in combinations((1, 2), size):
                    wdisc = weights.gamma_u(u) * rn.exact_star_discrepancy(pts, u)
                    assert wdisc <= gb.value + 1e-12
