"""Weighted star discrepancy machinery.

Local discrepancy and an exact small-scale star discrepancy oracle work on
any point block; the bound side combines per-projection quality parameters,
the coefficient table of the general net discrepancy bound, and product
weights into a single global upper bound.  Reduction-index choosers invert
the bound: given weights, pick indices that keep the bound dimension-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .nets import PointBlock, ReductionSchedule
from .quality import DEFAULT_BUDGET, EnumerationBudgetError

__all__ = [
    "GlobalBound",
    "WeightModel",
    "avb_coefficients",
    "choose_reduction_indices",
    "exact_star_discrepancy",
    "global_disc_bound",
    "local_discrepancy",
    "projection_disc_bound",
    "zeta_product_check",
    "zeta_value",
]


@dataclass(frozen=True)
class WeightModel:
    """Product weights gamma_j, nonincreasing and positive.

    kinds: ``const`` (gamma_j = param), ``poly`` (gamma_j = j^-param), or
    ``list`` (explicit values; anything past the list is an error).  kappa
    and decay_tau parameterize the two reduction-index choosers.
    """

    kind: str
    param: float = 1.0
    values: tuple[float, ...] = ()
    kappa: float | None = None
    decay_tau: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "const":
            if not self.param > 0:
                raise ValueError("constant weight must be positive")
        elif self.kind == "poly":
            if self.param < 0:
                raise ValueError("polynomial decay exponent must be >= 0")
        elif self.kind == "list":
            if not self.values:
                raise ValueError("empty weight list")
            if any(not v > 0 for v in self.values):
                raise ValueError("weights must be positive")
            if any(a < b for a, b in zip(self.values, self.values[1:])):
                raise ValueError("weights must be nonincreasing")
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.decay_tau is not None and not 1.0 < self.decay_tau < 2.0:
            raise ValueError("decay_tau must lie in (1, 2)")

    @classmethod
    def constant(cls, c: float, **kw) -> WeightModel:
        return cls("const", param=c, **kw)

    @classmethod
    def polynomial(cls, p: float, **kw) -> WeightModel:
        return cls("poly", param=p, **kw)

    @classmethod
    def explicit(cls, values: Sequence[float], **kw) -> WeightModel:
        return cls("list", values=tuple(float(v) for v in values), **kw)

    @classmethod
    def parse(cls, text: str, **kw) -> WeightModel:
        """Grammar: ``const:<c>`` | ``poly:<p>`` | comma-separated values."""
        if text.startswith("const:"):
            return cls.constant(float(text[6:]), **kw)
        if text.startswith("poly:"):
            return cls.polynomial(float(text[5:]), **kw)
        return cls.explicit([float(v) for v in text.split(",")], **kw)

    def spec(self) -> str:
        """Inverse of :meth:`parse`."""
        if self.kind == "const":
            return f"const:{self.param}"
        if self.kind == "poly":
            return f"poly:{self.param}"
        return ",".join(repr(v) for v in self.values)

    def gamma(self, j: int) -> float:
        """Weight of coordinate j, 1-based."""
        if j < 1:
            raise ValueError("coordinates are 1-based")
        if self.kind == "const":
            return self.param
        if self.kind == "poly":
            return float(j) ** -self.param
        if j > len(self.values):
            raise ValueError(f"weight list has only {len(self.values)} entries")
        return self.values[j - 1]

    def gammas(self, s: int) -> np.ndarray:
        if self.kind == "const":
            return np.full(s, self.param)
        if self.kind == "poly":
            return np.arange(1, s + 1, dtype=np.float64) ** -self.param
        if s > len(self.values):
            raise ValueError(f"weight list has only {len(self.values)} entries")
        return np.array(self.values[:s])

    def gamma_u(self, u: Sequence[int]) -> float:
        out = 1.0
        for j in u:
            out *= self.gamma(j)
        return out

    def j_zero(self, s: int) -> int:
        """Minimal j0 with gamma_j <= 1 for all j > j0 (0 if gamma_1 <= 1)."""
        g = self.gammas(s)
        above = np.nonzero(g > 1.0)[0]
        return int(above[-1]) + 1 if above.size else 0


def local_discrepancy(
    points: PointBlock, u: Sequence[int], x: Sequence[float]
) -> float:
    """Counting error of the anchored box [0, x) projected onto u.

    Counts points with y_j < x_j strictly for all j in u (1-based), divides
    by b^m, and subtracts the box volume.
    """
    u = tuple(int(j) for j in u)
    if not u:
        raise ValueError("subset must be nonempty")
    if len(x) != len(u):
        raise ValueError("x must have one entry per coordinate in u")
    if any(not 0.0 < xj <= 1.0 for xj in x):
        raise ValueError("x must lie in (0, 1]^|u|")
    coords = points.coords()
    mask = np.ones(points.n_points, dtype=bool)
    vol = 1.0
    for j, xj in zip(u, x):
        mask &= coords[:, j - 1] < xj
        vol *= xj
    n = points.base**points.m
    return int(mask.sum()) / n - vol


def _axis_grids(points: PointBlock, cols: Sequence[int]) -> list[np.ndarray]:
    full = points.base**points.m
    grids = []
    for c in cols:
        vals = np.unique(points.numerators[:, c])
        if vals.size == 0 or vals[-1] != full:
            vals = np.concatenate([vals, [full]])
        grids.append(vals.astype(np.int64))
    return grids


def exact_star_discrepancy(
    points: PointBlock,
    u: Sequence[int] | None = None,
    *,
    budget: int = 1 << 25,
) -> float:
    """Exact sup of |local discrepancy| over (0, 1]^|u|.

    The sup is attained in the limit at corners of the grid spanned by the
    distinct point coordinates and 1: at each corner both one-sided limits
    are evaluated (the strict inequality in the counting means the value
    from above uses closed counts, the value at the corner open counts).
    All comparisons are integer-exact; cost and the budget are measured in
    grid corners, which grow as N^|u|.
    """
    if u is None:
        u = tuple(range(1, points.s + 1))
    u = tuple(sorted(set(int(j) for j in u)))
    d = len(u)
    if d < 1 or d > 3:
        raise ValueError("exact star discrepancy supports 1 <= |u| <= 3")
    n_full = points.base**points.m
    if n_full > 4096:
        raise ValueError("exact star discrepancy supports b^m <= 4096")
    cols = [j - 1 for j in u]
    grids = _axis_grids(points, cols)
    n_cells = math.prod(g.size for g in grids)
    if n_cells > budget:
        raise EnumerationBudgetError(
            f"{n_cells} grid corners exceed budget {budget}"
        )

    # Histogram of points at their per-axis grid positions; an inclusive
    # prefix sum per axis turns it into closed counts #{y <= corner}.
    hist = np.zeros(tuple(g.size for g in grids), dtype=np.int64)
    idx = tuple(
        np.searchsorted(g, points.numerators[:, c])
        for g, c in zip(grids, cols)
    )
    np.add.at(hist, idx, 1)
    closed = hist
    for axis in range(d):
        np.cumsum(closed, axis=axis, out=closed)

    # Open counts #{y < corner} equal the closed counts one grid step back
    # in every axis (coordinates sit exactly on grid values).  Scan slices
    # along the first axis to keep one full-size array alive.
    rest = grids[1:]
    if rest:
        rest_vol = rest[0].reshape(-1, *([1] * (len(rest) - 1)))
        for axis in range(1, len(rest)):
            shape = [1] * len(rest)
            shape[axis] = -1
            rest_vol = rest_vol * rest[axis].reshape(shape)
    else:
        rest_vol = np.int64(1)
    # Deviations live over the common denominator b^(m d); numerators fit
    # in int64 for b^m <= 4096 and d <= 3.
    scale = n_full ** (d - 1)
    best = 0
    zero_slice = np.int64(0)
    for i in range(grids[0].size):
        vol = grids[0][i] * rest_vol
        dev_plus = closed[i] * scale - vol
        if i == 0:
            open_slice = zero_slice
        else:
            prev = closed[i - 1]
            for axis in range(d - 1):
                pad = [(0, 0)] * (d - 1)
                pad[axis] = (1, 0)
                sl = [slice(None)] * (d - 1)
                sl[axis] = slice(0, -1)
                prev = np.pad(prev, pad)[tuple(sl)]
            open_slice = prev
        dev_minus = vol - open_slice * scale
        best = max(best, int(np.max(dev_plus)), int(np.max(dev_minus)))
    return best / float(n_full**d)


def avb_coefficients(base: int, u_size: int) -> list[Fraction]:
    """Coefficients a_{v,b} of the m-polynomial in the projection bound.

    Exact rationals for v = 0, ..., u_size - 1; needs u_size >= 2.  The base
    cases split on the parity of the base.
    """
    if u_size < 2:
        raise ValueError("coefficients are defined for |u| >= 2")
    if base % 2 == 0:
        a0 = Fraction(base + 8, 4)
        a1 = Fraction(base * base, 4 * (base + 1))
    else:
        a0 = Fraction(base + 4, 2)
        a1 = Fraction(base - 1, 4)
    half_b2 = Fraction(base + 2, 2)
    out = []
    for v in range(u_size):
        first = (
            Fraction(math.comb(u_size - 2, v))
            * half_b2 ** (u_size - 2 - v)
            * Fraction((base - 1) ** v, 2**v * math.factorial(v))
            * (a0 + u_size * u_size - 4)
        )
        if v >= 1:
            second = (
                Fraction(math.comb(u_size - 2, v - 1))
                * half_b2 ** (u_size - 1 - v)
                * Fraction((base - 1) ** (v - 1), 2 ** (v - 1) * math.factorial(v))
                * a1
            )
        else:
            second = Fraction(0)
        out.append(first + second)
    return out


def projection_disc_bound(
    base: int, m: int, t_u_tilde: int, u_size: int, in_sstar: bool
) -> float:
    """Star discrepancy bound of one projection of a reduced net.

    Projections touching a fully reduced coordinate are only bounded by 1;
    others use b^t / b^m, with the m-polynomial factor for |u| >= 2.
    """
    if not 0 <= t_u_tilde <= m:
        raise ValueError("need 0 <= t <= m")
    if not in_sstar:
        return 1.0
    lead = Fraction(base**t_u_tilde, base**m)
    if u_size == 1:
        return float(lead)
    coeffs = avb_coefficients(base, u_size)
    poly = sum(c * m**v for v, c in enumerate(coeffs))
    return float(lead * poly)


@dataclass(frozen=True)
class GlobalBound:
    """Weighted star discrepancy bound, split into its three maxima.

    ``outside``: subsets touching a fully reduced coordinate (closed-form
    maximization over those subsets; None when s = s*).  ``singles``:
    one-coordinate projections.  ``higher``: projections of size 2 up to the
    cap.  ``value`` is the overall max.
    """

    outside: float | None
    singles: float
    higher: float | None
    value: float


def global_disc_bound(
    net_t_u: Mapping[tuple[int, ...], int],
    sched: ReductionSchedule,
    weights: WeightModel,
    base: int,
    m: int,
    s: int,
    proj_cap: int = 4,
    *,
    budget: int = DEFAULT_BUDGET,
) -> GlobalBound:
    """Upper bound on the weighted star discrepancy of the reduced net.

    ``net_t_u`` maps 1-based coordinate subsets of [s*] (up to proj_cap) to
    the quality parameter of the *unreduced* net's projection; the reduced
    projections are bounded through min(m, w_max(u) + t_u).  The single-
    coordinate term uses the same clamp.
    """
    if sched.s != s:
        raise ValueError("schedule length does not match s")
    s_star = sched.s_star(m)
    g = weights.gammas(s)
    bm = float(base) ** m

    outside: float | None = None
    if s_star < s:
        factors = g * (1.0 + np.power(float(base), np.array(sched.w, dtype=float)))
        # The maximizing subset takes every factor > 1 and, if none of the
        # fully reduced coordinates has one, the largest factor among them.
        prod = float(np.prod(np.maximum(1.0, factors)))
        tail = factors[s_star:]
        if not np.any(tail > 1.0):
            prod *= float(tail.max())
        outside = prod / bm

    singles = 0.0
    for j in range(1, s_star + 1):
        t_j = net_t_u.get((j,))
        if t_j is None:
            raise ValueError(f"missing t value for projection ({j},)")
        singles = max(
            singles, float(g[j - 1]) * base ** min(m, sched.w[j - 1] + t_j) / bm
        )

    higher: float | None = None
    max_size = min(proj_cap, s_star)
    n_subsets = sum(math.comb(s_star, k) for k in range(2, max_size + 1))
    if n_subsets > budget:
        raise EnumerationBudgetError(
            f"{n_subsets} projections exceed budget {budget}"
        )
    for size in range(2, max_size + 1):
        coeffs = avb_coefficients(base, size)
        poly = float(sum(c * m**v for v, c in enumerate(coeffs)))
        for u in combinations(range(1, s_star + 1), size):
            t_u = net_t_u.get(u)
            if t_u is None:
                raise ValueError(f"missing t value for projection {u}")
            w_bar = sched.w[max(u) - 1]
            val = (
                weights.gamma_u(u)
                * base ** min(m, w_bar + t_u)
                / bm
                * poly
            )
            higher = val if higher is None else max(higher, val)

    candidates = [v for v in (outside, singles, higher) if v is not None]
    return GlobalBound(
        outside=outside,
        singles=singles,
        higher=higher,
        value=max(candidates),
    )


def choose_reduction_indices(
    weights: WeightModel,
    base: int,
    m: int,
    s: int,
    scheme: str,
) -> ReductionSchedule:
    """Reduction indices from the weights.

    ``kappa``: w_j = min(floor(log_b(((kappa / gamma_1^j0)^(1/s) - 1) / gamma_j)), m),
    keeping the product gamma_j (1 + b^w_j) below kappa.  ``zeta``: for
    gamma_j = j^-2 and decay exponent tau in (1, 2),
    w_j = min(floor(log_b(j^(2 - tau))), m), which is s-independent.
    Negative logarithms clamp to 0 and w_1 is forced to 0.
    """
    if scheme == "kappa":
        if weights.kappa is None:
            raise ValueError("kappa scheme needs weights.kappa")
        j0 = weights.j_zero(s)
        head = weights.gamma(1) ** j0
        if not weights.kappa > head:
            raise ValueError("kappa must exceed gamma_1^j0")
        target = (weights.kappa / head) ** (1.0 / s) - 1.0
        w = []
        for j in range(1, s + 1):
            arg = target / weights.gamma(j)
            wj = math.floor(math.log(arg, base)) if arg > 1.0 else 0
            w.append(min(max(wj, 0), m))
    elif scheme == "zeta":
        if weights.decay_tau is None:
            raise ValueError("zeta scheme needs weights.decay_tau")
        if weights.kind != "poly" or weights.param != 2:
            raise ValueError("zeta scheme assumes weights poly:2")
        tau = weights.decay_tau
        w = [
            min(max(math.floor((2.0 - tau) * math.log(j, base)), 0), m)
            for j in range(1, s + 1)
        ]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    w[0] = 0
    return ReductionSchedule(tuple(w))


def zeta_value(tau: float, *, terms: int = 1_000_000) -> float:
    """Riemann zeta at tau > 1 by partial sum plus a midpoint integral tail.

    The tail int_{M + 1/2}^inf x^-tau dx keeps the absolute error below
    1e-10 for tau >= 1.1 and the default number of terms.
    """
    if not tau > 1.0:
        raise ValueError("zeta_value needs tau > 1")
    js = np.arange(1, terms + 1, dtype=np.float64)
    partial = float(np.sum(js**-tau))
    tail = (terms + 0.5) ** (1.0 - tau) / (tau - 1.0)
    return partial + tail


def zeta_product_check(
    weights: WeightModel,
    sched: ReductionSchedule,
    base: int,
    s: int,
) -> tuple[float, float]:
    """Product prod_j (1 + gamma_j b^w_j) and its zeta-scheme bound exp(zeta(tau))."""
    if weights.decay_tau is None:
        raise ValueError("needs weights.decay_tau")
    if sched.s < s:
        raise ValueError("schedule shorter than s")
    g = weights.gammas(s)
    w = np.array(sched.w[:s], dtype=np.float64)
    product = float(np.prod(1.0 + g * np.power(float(base), w)))
    return product, math.exp(zeta_value(weights.decay_tau))
