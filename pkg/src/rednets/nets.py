"""Digital net construction, column/row reduction, and exact point generation.

A net over F_b with b^m points in dimension s is described by s generating
matrices of shape m x m.  The k-th point has coordinates built by multiplying
each matrix with the base-b digit vector of k (least significant digit
first) and reading the output digits as b-adic fractions.  Points are kept
as exact integer numerators over the denominator b^m so that net properties
can be verified without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterator, Sequence

import numpy as np

from .gfmat import FieldMatrix, is_prime, mat_vec

__all__ = [
    "NetSpec",
    "PointBlock",
    "ReductionSchedule",
    "block_diag_seq",
    "column_reduce",
    "coordinate_numerators",
    "generate_points",
    "pascal_net",
    "prepend_zero_columns_seq",
    "random_net",
    "read_net",
    "row_reduce",
    "write_net",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NetSpec:
    """Generating matrices of a digital net of b^m points in dimension s.

    ``declared_t`` is a quality claim carried by constructions with known
    t-value; reductions drop it and quality analysis re-derives it.
    """

    base: int
    m: int
    matrices: tuple[FieldMatrix, ...]
    declared_t: int | None = None
    provenance: str = "constructed"

    def __post_init__(self) -> None:
        if not is_prime(self.base):
            raise ValueError(f"base must be prime, got {self.base}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not self.matrices:
            raise ValueError("need at least one generating matrix")
        for c in self.matrices:
            if c.base != self.base:
                raise ValueError("matrix base differs from net base")
            if c.n_rows != self.m or c.n_cols != self.m:
                raise ValueError(f"matrices must be {self.m}x{self.m}")
        if self.declared_t is not None and not 0 <= self.declared_t <= self.m:
            raise ValueError("declared_t outside [0, m]")

    @property
    def s(self) -> int:
        return len(self.matrices)

    @property
    def n_points(self) -> int:
        return self.base**self.m


@dataclass(frozen=True)
class ReductionSchedule:
    """Nondecreasing per-coordinate reduction indices with w_1 = 0.

    The schedule is independent of m; ``s_star(m)`` gives the largest index
    whose coordinate is not reduced away entirely (0 if there is none).
    """

    w: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.w:
            raise ValueError("empty schedule")
        if self.w[0] != 0:
            raise ValueError("w_1 must be 0")
        for a, b in zip(self.w, self.w[1:]):
            if b < a:
                raise ValueError("reduction indices must be nondecreasing")
        if any(x < 0 for x in self.w):
            raise ValueError("reduction indices must be nonnegative")

    @property
    def s(self) -> int:
        return len(self.w)

    def s_star(self, m: int) -> int:
        """Largest 1-based index j with w_j < m, or 0 if none."""
        for j in range(len(self.w), 0, -1):
            if self.w[j - 1] < m:
                return j
        return 0

    @classmethod
    def explicit(cls, w: Sequence[int]) -> ReductionSchedule:
        return cls(tuple(int(x) for x in w))

    @classmethod
    def floor_log(
        cls, s: int, base: int, m: int, num: int = 1, den: int = 1
    ) -> ReductionSchedule:
        """w_j = min(floor(log_base(j^(num/den))), m), computed exactly.

        num=den=1 gives floor(log_b j); num=1, den=2 gives floor(log_b sqrt(j)).
        """
        if num < 0 or den < 1:
            raise ValueError("exponent must be a nonnegative rational")
        w = []
        for j in range(1, s + 1):
            k = 0
            # largest k with base^(k*den) <= j^num
            while base ** ((k + 1) * den) <= j**num:
                k += 1
            w.append(min(k, m))
        return cls(tuple(w))


@dataclass(frozen=True)
class PointBlock:
    """N x s block of points stored as integer numerators over b^m."""

    base: int
    m: int
    numerators: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        nums = np.ascontiguousarray(self.numerators, dtype=np.int64)
        if nums.ndim != 2:
            raise ValueError("numerators must be a 2-d array")
        if nums.size and (nums.min() < 0 or nums.max() >= self.base**self.m):
            raise ValueError("numerators outside [0, b^m)")
        nums.flags.writeable = False
        object.__setattr__(self, "numerators", nums)

    @property
    def n_points(self) -> int:
        return self.numerators.shape[0]

    @property
    def s(self) -> int:
        return self.numerators.shape[1]

    def coords(self) -> np.ndarray:
        """Coordinates as float64 in [0, 1)."""
        return self.numerators / float(self.base**self.m)

    def coord_fraction(self, k: int, j: int) -> Fraction:
        """Exact coordinate x_{k,j} (j is 0-based here)."""
        return Fraction(int(self.numerators[k, j]), self.base**self.m)

    def write_csv(self, fh: IO[str]) -> None:
        """CSV export: header ``k,x1,...,xs``; each value as ``num/b^m``.

        Values are exact fractions with the fixed denominator b^m written in
        decimal digits, e.g. ``12/16``; 0 is written as ``0/16``.
        """
        den = self.base**self.m
        fh.write("k," + ",".join(f"x{j + 1}" for j in range(self.s)) + "\n")
        for k in range(self.n_points):
            row = ",".join(f"{int(v)}/{den}" for v in self.numerators[k])
            fh.write(f"{k},{row}\n")


def _splitmix64(seed: int) -> Iterator[int]:
    """SplitMix64 stream; fixed algorithm so seeds reproduce across platforms."""
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def _uniform_digits(seed: int, count: int, base: int) -> list[int]:
    # Rejection sampling keeps the digits exactly uniform on {0, ..., base-1}.
    stream = _splitmix64(seed)
    limit = (1 << 64) - ((1 << 64) % base)
    out = []
    while len(out) < count:
        v = next(stream)
        if v < limit:
            out.append(v % base)
    return out


def pascal_net(base: int, m: int, s: int) -> NetSpec:
    """Net generated by powers of the upper-triangular binomial matrix.

    The first matrix is the identity, the second has entries
    binom(r-1, i-1) mod base at row i, column r, and coordinate j uses the
    (j-1)-th power of that matrix.  The quality claim t = 0 is only attached
    for base 2 with s <= 2.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if s < 1:
        raise ValueError("s must be >= 1")
    binom = FieldMatrix(
        base,
        m,
        m,
        tuple(math.comb(r, i) % base for i in range(m) for r in range(m)),
    )
    matrices = tuple(binom.matpow(j) for j in range(s))
    declared = 0 if (base == 2 and s <= 2) else None
    return NetSpec(base, m, matrices, declared_t=declared, provenance="pascal")


def random_net(base: int, m: int, s: int, seed: int) -> NetSpec:
    """Net with i.i.d. uniform matrix entries, deterministic in the seed.

    Entries come from a SplitMix64 stream reduced by rejection sampling, so
    the same (base, m, s, seed) reproduces the same net anywhere.
    """
    digits = _uniform_digits(seed, s * m * m, base)
    matrices = []
    for j in range(s):
        ent = tuple(digits[j * m * m : (j + 1) * m * m])
        matrices.append(FieldMatrix(base, m, m, ent))
    return NetSpec(base, m, tuple(matrices), provenance=f"random(seed={seed})")


def _check_schedule(net: NetSpec, sched: ReductionSchedule) -> None:
    if sched.s != net.s:
        raise ValueError(f"schedule length {sched.s} != net dimension {net.s}")


def column_reduce(net: NetSpec, sched: ReductionSchedule) -> NetSpec:
    """Zero the last min(m, w_j) columns of each generating matrix."""
    _check_schedule(net, sched)
    m = net.m
    matrices = []
    for c, wj in zip(net.matrices, sched.w):
        keep = m - min(m, wj)
        ent = tuple(
            c.at(i, j) if j < keep else 0 for i in range(m) for j in range(m)
        )
        matrices.append(FieldMatrix(net.base, m, m, ent))
    return NetSpec(net.base, m, tuple(matrices), provenance="constructed")


def row_reduce(net: NetSpec, sched: ReductionSchedule) -> NetSpec:
    """Zero the last min(m, w_j) rows instead; comparison utility only."""
    _check_schedule(net, sched)
    m = net.m
    matrices = []
    for c, wj in zip(net.matrices, sched.w):
        keep = m - min(m, wj)
        ent = tuple(
            c.at(i, j) if i < keep else 0 for i in range(m) for j in range(m)
        )
        matrices.append(FieldMatrix(net.base, m, m, ent))
    return NetSpec(net.base, m, tuple(matrices), provenance="constructed")


def prepend_zero_columns_seq(
    d1: FieldMatrix, d2: FieldMatrix, t: int, m: int
) -> NetSpec:
    """Two-dimensional net with t zero columns prepended to both matrices.

    C_j is [0_{m x t} | left m x (m-t) block of D_j].  When D_1, D_2 generate
    a (0,2)-sequence the result carries declared_t = t; the caller is
    responsible for that hypothesis.
    """
    if t < 0 or t > m:
        raise ValueError("need 0 <= t <= m")
    matrices = []
    for d in (d1, d2):
        if d.base != d1.base:
            raise ValueError("base mismatch")
        if d.n_rows < m or d.n_cols < m:
            raise ValueError(f"input matrices must be at least {m}x{m}")
        ent = tuple(
            d.at(i, j - t) if j >= t else 0 for i in range(m) for j in range(m)
        )
        matrices.append(FieldMatrix(d.base, m, m, ent))
    return NetSpec(
        d1.base, m, tuple(matrices), declared_t=t, provenance="constructed"
    )


def block_diag_seq(d2: FieldMatrix, t: int, m: int) -> FieldMatrix:
    """Block-diagonal matrix with the t x t and (m-t) x (m-t) blocks of D_2.

    Pairs with the first matrix of :func:`prepend_zero_columns_seq` to form
    the strict two-dimensional example whose reduced linear independence
    parameter equals m - max(t, w_2) exactly.
    """
    if t < 0 or t > m:
        raise ValueError("need 0 <= t <= m")
    if d2.n_rows < max(t, m - t) or d2.n_cols < max(t, m - t):
        raise ValueError("input matrix too small for the requested blocks")
    ent = []
    for i in range(m):
        for j in range(m):
            if i < t and j < t:
                ent.append(d2.at(i, j))
            elif i >= t and j >= t:
                ent.append(d2.at(i - t, j - t))
            else:
                ent.append(0)
    return FieldMatrix(d2.base, m, m, tuple(ent))


def _digit_matrix(base: int, n_digits: int, m: int) -> np.ndarray:
    """(base^n_digits) x m matrix of digit vectors, LSB first, zero padded."""
    n = base**n_digits
    ks = np.arange(n, dtype=np.int64)
    cols = [((ks // base**i) % base) for i in range(n_digits)]
    cols.extend(np.zeros(n, dtype=np.int64) for _ in range(m - n_digits))
    return np.stack(cols, axis=1) if cols else np.zeros((n, 0), dtype=np.int64)


def coordinate_numerators(mat: FieldMatrix, n_digits: int) -> np.ndarray:
    """Numerators of one coordinate over the first base^n_digits indices."""
    m = mat.n_rows
    if mat.n_cols != m:
        raise ValueError("generating matrix must be square")
    if not 0 <= n_digits <= m:
        raise ValueError("n_digits outside [0, m]")
    base = mat.base
    digs = _digit_matrix(base, n_digits, m)
    c = np.array(mat.rows(), dtype=np.int64).reshape(m, m)
    out_digits = (digs @ c.T) % base
    weights = base ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return out_digits @ weights


def generate_points(net: NetSpec, first_digits: int | None = None) -> PointBlock:
    """Points of the net over indices k = 0, ..., b^first_digits - 1.

    Digit vectors shorter than m are zero padded, so first_digits = m gives
    the full net and smaller values give the leading block.
    """
    m = net.m
    if first_digits is None:
        first_digits = m
    if not 0 <= first_digits <= m:
        raise ValueError("first_digits outside [0, m]")
    if net.base**m >= 1 << 62:
        raise ValueError("b^m too large for exact 64-bit numerators")
    n = net.base**first_digits
    nums = np.empty((n, net.s), dtype=np.int64)
    digs = _digit_matrix(net.base, first_digits, m)
    weights = net.base ** np.arange(m - 1, -1, -1, dtype=np.int64)
    for j, mat in enumerate(net.matrices):
        c = np.array(mat.rows(), dtype=np.int64).reshape(m, m)
        nums[:, j] = ((digs @ c.T) % net.base) @ weights
    return PointBlock(net.base, m, nums)


def point_slow(net: NetSpec, k: int) -> tuple[Fraction, ...]:
    """Single point via scalar matrix-vector products; test oracle path."""
    m = net.m
    digits = [(k // net.base**i) % net.base for i in range(m)]
    out = []
    for mat in net.matrices:
        ys = mat_vec(mat, digits)
        num = sum(y * net.base ** (m - 1 - i) for i, y in enumerate(ys))
        out.append(Fraction(num, net.base**m))
    return tuple(out)


def write_net(net: NetSpec, fh: IO[str]) -> None:
    """Text format: line ``b m s``; then for each j, m lines of m digits."""
    fh.write(f"{net.base} {net.m} {net.s}\n")
    for mat in net.matrices:
        for i in range(net.m):
            fh.write(" ".join(str(e) for e in mat.row(i)) + "\n")


def read_net(fh: IO[str]) -> NetSpec:
    """Parse the :func:`write_net` format; blank lines are ignored."""
    lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError("empty net file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError("header must be 'b m s'")
    base, m, s = (int(x) for x in head)
    need = 1 + s * m
    if len(lines) != need:
        raise ValueError(f"expected {need} lines, found {len(lines)}")
    matrices = []
    pos = 1
    for _ in range(s):
        rows = []
        for _ in range(m):
            row = [int(x) for x in lines[pos].split()]
            if len(row) != m:
                raise ValueError(f"row length {len(row)} != m = {m}")
            rows.append(row)
            pos += 1
        matrices.append(FieldMatrix.from_rows(base, rows))
    return NetSpec(base, m, tuple(matrices), provenance="file")
