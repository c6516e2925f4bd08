"""Exact quality analysis of digital nets.

Two routes are provided and kept independent on purpose: rank conditions on
the generating matrices (the linear independence parameter), and brute-force
counting of points in elementary intervals.  For a digital net the minimal
quality parameter t relates to the linear independence parameter rho by
rho >= m - t, with equality for strict nets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .gfmat import rank, stack_rows
from .nets import (
    NetSpec,
    PointBlock,
    ReductionSchedule,
    column_reduce,
    generate_points,
)

__all__ = [
    "DEFAULT_BUDGET",
    "EnumerationBudgetError",
    "QualityReport",
    "TheoremBounds",
    "analyze",
    "rho",
    "strict_t",
    "theorem_bounds",
    "verify_tms_net",
    "verify_tmes_net",
]

DEFAULT_BUDGET = 10_000_000


class EnumerationBudgetError(RuntimeError):
    """Raised when a brute-force enumeration would exceed its work budget."""


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All nonnegative integer tuples with the given sum, ascending lex.

    Ascending lexicographic order puts the mass on the last coordinate
    first, which is where failures concentrate for reduced nets, so searches
    falsify early.
    """
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def _n_compositions(total: int, parts: int) -> int:
    return math.comb(total + parts - 1, parts - 1)


def _normalize_subset(u: Sequence[int] | None, s: int) -> tuple[int, ...]:
    if u is None:
        return tuple(range(1, s + 1))
    u = tuple(sorted(set(int(j) for j in u)))
    if not u:
        raise ValueError("subset must be nonempty")
    if u[0] < 1 or u[-1] > s:
        raise ValueError(f"subset indices must lie in [1, {s}]")
    return u


def rho(
    net: NetSpec,
    u: Sequence[int] | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Linear independence parameter of the matrices with indices in u.

    Largest r such that every choice of first-row counts d_1 + ... = r gives
    linearly independent rows; 0 if that already fails at r = 1.  Coordinate
    indices in u are 1-based and default to all of them.
    """
    u = _normalize_subset(u, net.s)
    k = len(u)
    m = net.m
    work = sum(_n_compositions(r, k) * r * m for r in range(1, m + 1))
    if work > budget:
        raise EnumerationBudgetError(
            f"rho enumeration needs ~{work} work units, budget is {budget}"
        )
    mats = [net.matrices[j - 1] for j in u]
    for r in range(1, m + 1):
        for d in compositions(r, k):
            if any(dj > m for dj in d):
                continue
            stacked = stack_rows(list(zip(mats, d)))
            if rank(stacked) != r:
                return r - 1
    return m


@dataclass(frozen=True)
class TheoremBounds:
    """Bounds for a column-reduced net derived from a digital sequence.

    ``lower``/``upper`` sandwich the reduced linear independence parameter,
    ``t_upper`` bounds the reduced quality parameter, and ``strict_upper``
    replaces ``upper`` when the original net (projection) is strict.
    """

    lower: int
    upper: int
    t_upper: int
    strict_upper: int


def theorem_bounds(
    t: int,
    m: int,
    sched: ReductionSchedule,
    u: Sequence[int] | None = None,
) -> TheoremBounds:
    """Evaluate the reduced-net bounds for the projection onto u.

    ``t`` is the quality parameter of the unreduced net's projection onto u.
    Only the largest reduction index over u matters because the schedule is
    nondecreasing.
    """
    if not 0 <= t <= m:
        raise ValueError("need 0 <= t <= m")
    u = _normalize_subset(u, sched.s)
    w_bar = sched.w[max(u) - 1]
    return TheoremBounds(
        lower=max(0, m - w_bar - t),
        upper=max(0, m - w_bar),
        t_upper=min(m, w_bar + t),
        strict_upper=max(0, m - max(t, w_bar)),
    )


def _cell_counts_ok(
    points: PointBlock,
    cols: Sequence[int],
    depths: Sequence[int],
    t: int,
) -> bool:
    """Check that every cell of the given digit depths holds exactly b^t points."""
    b = points.base
    m = points.m
    n_cells = 1
    key = np.zeros(points.n_points, dtype=np.int64)
    for col, d in zip(cols, depths):
        cell = points.numerators[:, col] // b ** (m - d)
        key = key * b**d + cell
        n_cells *= b**d
    counts = np.bincount(key, minlength=n_cells)
    return bool(np.all(counts == b**t))


def verify_tms_net(
    points: PointBlock,
    t: int,
    u: Sequence[int] | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """Exhaustively test the net property at quality parameter t.

    True iff every elementary interval of volume b^(t-m) in the coordinates
    of u contains exactly b^t points.  Cell membership is decided on integer
    numerators, so the test is exact.
    """
    m = points.m
    if not 0 <= t <= m:
        raise ValueError("need 0 <= t <= m")
    if points.n_points != points.base**m:
        raise ValueError("verification needs the full b^m-point block")
    u = _normalize_subset(u, points.s)
    k = len(u)
    n_shapes = _n_compositions(m - t, k)
    if n_shapes * points.n_points > budget:
        raise EnumerationBudgetError(
            f"{n_shapes} interval shapes x {points.n_points} points "
            f"exceeds budget {budget}"
        )
    cols = [j - 1 for j in u]
    for depths in compositions(m - t, k):
        if not _cell_counts_ok(points, cols, depths, t):
            return False
    return True


def strict_t(
    points: PointBlock,
    u: Sequence[int] | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Smallest t for which the net property holds (scan t = 0, 1, ..., m)."""
    for t in range(points.m + 1):
        if verify_tms_net(points, t, u, budget=budget):
            return t
    raise AssertionError("t = m always verifies; unreachable")


def verify_tmes_net(
    points: PointBlock,
    t: int,
    e: Sequence[int],
    *,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """Net check restricted to interval shapes with per-axis depths e_j d_j.

    Only solutions of e_1 d_1 + ... + e_s d_s = m - t are admissible shapes;
    when no solution exists the check is vacuously true.
    """
    m = points.m
    if not 0 <= t <= m:
        raise ValueError("need 0 <= t <= m")
    if points.n_points != points.base**m:
        raise ValueError("verification needs the full b^m-point block")
    e = tuple(int(x) for x in e)
    if len(e) != points.s:
        raise ValueError("shape vector length must equal the dimension")
    if any(ej < 1 for ej in e):
        raise ValueError("shape entries must be >= 1")

    def solutions(remaining: int, idx: int) -> Iterator[tuple[int, ...]]:
        if idx == len(e) - 1:
            if remaining % e[idx] == 0:
                yield (remaining // e[idx],)
            return
        for d in range(remaining // e[idx] + 1):
            for tail in solutions(remaining - d * e[idx], idx + 1):
                yield (d,) + tail

    sols = list(solutions(m - t, 0))
    if len(sols) * points.n_points > budget:
        raise EnumerationBudgetError(
            f"{len(sols)} interval shapes x {points.n_points} points "
            f"exceeds budget {budget}"
        )
    cols = list(range(points.s))
    for d in sols:
        depths = [ej * dj for ej, dj in zip(e, d)]
        if not _cell_counts_ok(points, cols, depths, t):
            return False
    return True


@dataclass(frozen=True)
class ProjectionQuality:
    rho: int
    t_exact: int | None
    t_upper: int


@dataclass(frozen=True)
class QualityReport:
    """Quality summary of a column-reduced net.

    ``rho`` and ``t_exact`` describe the reduced net over all coordinates;
    ``t_upper`` is the reduction-index bound min(m, w_s + t).  The projection
    table maps 1-based coordinate subsets (up to the configured size cap) to
    the same triple for the projected net.
    """

    base: int
    m: int
    s: int
    rho: int
    t_exact: int | None
    t_upper: int
    projections: dict[tuple[int, ...], ProjectionQuality]

    def to_json(self) -> str:
        """Stable JSON rendering; subset keys become comma-joined strings."""
        payload = {
            "base": self.base,
            "m": self.m,
            "s": self.s,
            "rho": self.rho,
            "t_exact": self.t_exact,
            "t_upper": self.t_upper,
            "projections": {
                ",".join(str(j) for j in u): {
                    "rho": q.rho,
                    "t_exact": q.t_exact,
                    "t_upper": q.t_upper,
                }
                for u, q in self.projections.items()
            },
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def analyze(
    net: NetSpec,
    sched: ReductionSchedule,
    *,
    proj_cap: int = 4,
    budget: int = DEFAULT_BUDGET,
) -> QualityReport:
    """Reduce the net and derive its quality report.

    The t-values of the unreduced net and of its projections are found by
    brute force (or taken from ``declared_t`` for the full set when present)
    and combined with the reduction indices into per-projection bounds.
    Projections larger than ``proj_cap`` coordinates are skipped.
    """
    reduced = column_reduce(net, sched)
    base_points = generate_points(net)
    red_points = generate_points(reduced)

    t_full = net.declared_t
    if t_full is None:
        t_full = strict_t(base_points, budget=budget)
    full_u = tuple(range(1, net.s + 1))
    bounds_full = theorem_bounds(t_full, net.m, sched, full_u)

    rho_full = rho(reduced, budget=budget)
    t_exact = strict_t(red_points, budget=budget)
    if rho_full < net.m - t_exact:
        raise AssertionError("rho < m - t contradicts the net property")

    projections: dict[tuple[int, ...], ProjectionQuality] = {}
    for size in range(1, min(proj_cap, net.s) + 1):
        for u in combinations(range(1, net.s + 1), size):
            t_u = strict_t(base_points, u, budget=budget)
            b_u = theorem_bounds(t_u, net.m, sched, u)
            projections[u] = ProjectionQuality(
                rho=rho(reduced, u, budget=budget),
                t_exact=strict_t(red_points, u, budget=budget),
                t_upper=b_u.t_upper,
            )
    return QualityReport(
        base=net.base,
        m=net.m,
        s=net.s,
        rho=rho_full,
        t_exact=t_exact,
        t_upper=bounds_full.t_upper,
        projections=projections,
    )
