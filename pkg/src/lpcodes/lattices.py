"""Integer lattices: HNF, sublattice enumeration, canonical congruence
forms, shortest vectors and exact closest-point distances.

Bases are plain tuples of row tuples; rows generate the lattice.  All
arithmetic is on Python ints, which are arbitrary precision, so the
products appearing at n = 3, volumes ~1500 (and far beyond) are exact
with no overflow concerns.

The Hermite normal form used throughout is row-style: upper triangular,
positive diagonal d_1..d_n, and 0 <= entry(i, j) < d_j for i < j.  Each
sublattice of Z^n has exactly one such basis, which makes the HNF both
the equality test and the enumeration order.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cache
from itertools import permutations, product
from typing import Iterator, Sequence

from .balls import iroot
from .errors import SingularMatrixError

Row = tuple[int, ...]
Basis = tuple[Row, ...]
Point = tuple[int, ...]


def as_basis(rows: Sequence[Sequence[int]]) -> Basis:
    """Normalize any sequence-of-sequences of ints to the tuple form."""
    b = tuple(tuple(int(x) for x in row) for row in rows)
    n = len(b)
    if n == 0 or any(len(row) != n for row in b):
        raise ValueError("basis must be a square matrix with at least one row")
    return b


def det(basis: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free Gaussian elimination)."""
    b = as_basis(basis)
    n = len(b)
    m = [list(row) for row in b]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def hnf(basis: Sequence[Sequence[int]]) -> Basis:
    """Row-style Hermite normal form of the row span of `basis`.

    Raises SingularMatrixError when the rows are linearly dependent.
    """
    b = as_basis(basis)
    n = len(b)
    rows = [list(r) for r in b]
    for col in range(n):
        # Euclidean-reduce the entries of this column across rows col..n-1
        # until a single nonzero pivot remains.
        while True:
            nz = [i for i in range(col, n) if rows[i][col] != 0]
            if not nz:
                raise SingularMatrixError("rows are linearly dependent")
            i0 = min(nz, key=lambda i: abs(rows[i][col]))
            if len(nz) == 1:
                break
            piv = rows[i0][col]
            for i in nz:
                if i == i0:
                    continue
                q = rows[i][col] // piv
                if q:
                    rows[i] = [a - q * c for a, c in zip(rows[i], rows[i0])]
        if i0 != col:
            rows[col], rows[i0] = rows[i0], rows[col]
        if rows[col][col] < 0:
            rows[col] = [-a for a in rows[col]]
        piv = rows[col][col]
        for i in range(col):
            q = rows[i][col] // piv
            if q:
                rows[i] = [a - q * c for a, c in zip(rows[i], rows[col])]
    return tuple(tuple(r) for r in rows)


def is_hnf(basis: Sequence[Sequence[int]]) -> bool:
    b = as_basis(basis)
    n = len(b)
    for i in range(n):
        if b[i][i] <= 0:
            return False
        if any(b[i][j] != 0 for j in range(i)):
            return False
        if any(not 0 <= b[k][i] < b[i][i] for k in range(i)):
            return False
    return True


def adjugate(basis: Sequence[Sequence[int]]) -> Basis:
    """Exact adjugate: basis @ adjugate == det * identity."""
    b = as_basis(basis)
    n = len(b)
    if det(b) == 0:
        raise SingularMatrixError("adjugate of a singular matrix")
    if n == 1:
        return ((1,),)

    def minor(r: int, c: int) -> int:
        sub = [
            [b[i][j] for j in range(n) if j != c] for i in range(n) if i != r
        ]
        return det(sub)

    return tuple(
        tuple((-1) ** (i + j) * minor(j, i) for j in range(n)) for i in range(n)
    )


def _ordered_factorizations(m: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-tuples of positive integers with product m, lexicographic."""
    if k == 1:
        yield (m,)
        return
    for d in range(1, m + 1):
        if m % d == 0:
            for rest in _ordered_factorizations(m // d, k - 1):
                yield (d, *rest)


def enumerate_sublattices(n: int, volume: int) -> Iterator[Basis]:
    """Every sublattice of Z^n with index `volume`, once each, as HNF bases.

    Deterministic order: diagonals lexicographically, then the above-diagonal
    entries in row-major odometer order.
    """
    if n not in (1, 2, 3, 4):
        raise ValueError("supported dimensions are 1..4")
    if volume < 1:
        raise ValueError("volume must be positive")
    cells = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for diag in _ordered_factorizations(volume, n):
        ranges = [range(diag[j]) for (_, j) in cells]
        for combo in product(*ranges):
            rows = [[0] * n for _ in range(n)]
            for i in range(n):
                rows[i][i] = diag[i]
            for (i, j), v in zip(cells, combo):
                rows[i][j] = v
            yield tuple(tuple(r) for r in rows)


def sublattice_count(n: int, volume: int) -> int:
    """Number of sublattices of Z^n with index `volume` (closed form:
    sum over diagonal factorizations of prod d_j**(j-1))."""
    total = 0
    for diag in _ordered_factorizations(volume, n):
        term = 1
        for j, d in enumerate(diag):
            term *= d**j
        total += term
    return total


@cache
def signed_permutations(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """The 2^n * n! signed coordinate permutations, each encoded as a
    tuple of (source index, sign) per output coordinate."""
    out = []
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            out.append(tuple((perm[j], signs[j]) for j in range(n)))
    return tuple(out)


def apply_transform(
    transform: tuple[tuple[int, int], ...], basis: Sequence[Sequence[int]]
) -> Basis:
    """Apply a signed coordinate permutation to every basis row."""
    return tuple(
        tuple(sign * row[src] for (src, sign) in transform) for row in basis
    )


def canonical_form(basis: Sequence[Sequence[int]]) -> Basis:
    """Canonical representative of the congruence class of the lattice:
    the lexicographically smallest HNF over all signed coordinate
    permutations.  Two lattices are congruent iff their canonical forms
    are equal."""
    b = as_basis(basis)
    n = len(b)
    best: Basis | None = None
    for t in signed_permutations(n):
        h = hnf(apply_transform(t, b))
        if best is None or h < best:
            best = h
    assert best is not None
    return best


def coset_representatives(hnf_basis: Sequence[Sequence[int]]) -> Iterator[Point]:
    """One point per coset of the lattice in Z^n: the box
    {0..d_1-1} x ... x {0..d_n-1} over the HNF diagonal."""
    b = as_basis(hnf_basis)
    for pt in product(*(range(b[i][i]) for i in range(len(b)))):
        yield pt


def coset_label(hnf_basis: Sequence[Sequence[int]], point: Sequence[int]) -> Point:
    """Reduce a point into the HNF diagonal box; two points get the same
    label iff they lie in the same coset of the lattice."""
    b = as_basis(hnf_basis)
    n = len(b)
    v = [int(x) for x in point]
    for i in range(n):
        q = v[i] // b[i][i]
        if q:
            for j in range(i, n):
                v[j] -= q * b[i][j]
    return tuple(v)


def contains(hnf_basis: Sequence[Sequence[int]], point: Sequence[int]) -> bool:
    """Membership of an integer point in the lattice."""
    return all(x == 0 for x in coset_label(hnf_basis, point))


def _norm_pow(v: Sequence[int], p: int) -> int:
    return sum(abs(x) ** p for x in v)


def _babai_seed(h: Basis, p: int, x: Sequence[int]) -> int:
    """Pow-distance from x to one reasonable lattice point (rounded
    back-substitution through the triangular basis); an upper bound for
    the exact search."""
    n = len(h)
    y = [Fraction(0)] * n
    for i in range(n):
        acc = Fraction(x[i])
        for k in range(i):
            acc -= y[k] * h[k][i]
        y[i] = acc / h[i][i]
    coeffs = [round(c) for c in y]  # banker's rounding is fine for a seed
    v = [0] * n
    for i in range(n):
        for j in range(n):
            v[j] += coeffs[i] * h[i][j]
    return _norm_pow([a - b for a, b in zip(x, v)], p)


def closest_lattice_distance_pow(
    basis: Sequence[Sequence[int]], p: int, x: Sequence[int]
) -> int:
    """Exact min over lattice points v of sum(|x_i - v_i|**p).

    Seeds an upper bound by Babai-style rounding, then enumerates every
    lattice point within that bound through the triangular structure,
    shrinking the bound as better points appear.
    """
    h = hnf(basis)
    n = len(h)
    xs = [int(c) for c in x]
    best = _babai_seed(h, p, xs)
    if best == 0:
        return 0
    # Choose v = sum_i y_i * row_i, deciding y in index order i = 0..n-1;
    # coordinate i of v is fixed once y_0..y_i are chosen because rows
    # below i have zeros there.
    partial = [0] * n  # running coordinates of v

    def descend(i: int, used: int) -> None:
        nonlocal best
        if i == n:
            if used < best:
                best = used
            return
        d = h[i][i]
        rem = best - used  # strictly positive slack still available
        if rem <= 0:
            return
        k = iroot(rem - 1, p)
        lo = (xs[i] - partial[i] - k + d - 1) // d  # ceil of (delta - k)/d
        hi = (xs[i] - partial[i] + k) // d
        for y in range(lo, hi + 1):
            for j in range(i, n):
                partial[j] += y * h[i][j]
            gap = abs(xs[i] - partial[i]) ** p
            if used + gap < best:
                descend(i + 1, used + gap)
            for j in range(i, n):
                partial[j] -= y * h[i][j]

    descend(0, 0)
    return best


def shortest_vector_pow(basis: Sequence[Sequence[int]], p: int) -> int:
    """Pow-norm of a shortest nonzero lattice vector, by exact enumeration.

    The shortest HNF row bounds the search radius; every lattice point
    within that pow-norm is visited through the triangular structure.
    """
    h = hnf(basis)
    n = len(h)
    best = min(_norm_pow(row, p) for row in h)
    partial = [0] * n

    def descend(i: int, used: int, any_nonzero: bool) -> None:
        nonlocal best
        if i == n:
            if any_nonzero and used < best:
                best = used
            return
        d = h[i][i]
        rem = best - used
        k = iroot(rem, p)  # allow ties so an equal-length witness survives
        lo = (-partial[i] - k + d - 1) // d
        hi = (-partial[i] + k) // d
        for y in range(lo, hi + 1):
            for j in range(i, n):
                partial[j] += y * h[i][j]
            gap = abs(partial[i]) ** p
            if used + gap <= best:
                descend(i + 1, used + gap, any_nonzero or y != 0)
            for j in range(i, n):
                partial[j] -= y * h[i][j]

    descend(0, 0, False)
    return best
