"""Shared helpers: independent brute-force oracles and canonicalization.

The oracles deliberately reimplement distance and coverage logic from
scratch (per-coordinate nearest-translate reduction over explicit
upper-triangular bases) so that agreement with the library is evidence,
not circularity.
"""

from __future__ import annotations

import math
from itertools import product

import pytest

from lpcodes.lattices import canonical_form


def canon_set(bases):
    """Canonicalize an iterable of bases into a set of class labels."""
    return {canonical_form(b) for b in bases}


def brute_dist_pow_2d(hnf, p, x, y):
    """Exact min over the lattice of |probe - point|_p^p.

    `hnf` must be upper triangular ((a,b),(0,d)).  Any lattice point
    within the current best distance has |x - i*a| below the best's
    p-th root, which bounds the i window; the j coordinate folds to a
    residue mod d.
    """
    a, b = hnf[0]
    d = hnf[1][1]
    i0 = round(x / a)
    dy = (y - i0 * b) % d
    dy = min(dy, d - dy)
    best = abs(x - i0 * a) ** p + dy**p
    w = int(math.ceil(best ** (1.0 / p))) + 1
    for i in range(math.ceil((x - w) / a), math.floor((x + w) / a) + 1):
        dx = abs(x - i * a)
        if dx**p > best:
            continue
        dy = (y - i * b) % d
        dy = min(dy, d - dy)
        best = min(best, dx**p + dy**p)
    return best


def brute_dist_pow_3d(hnf, p, probe):
    """Exact min over the lattice of |probe - point|_p^p, 3-D analogue."""
    (a11, a12, a13), (_, a22, a23), (_, _, a33) = hnf
    x, y, z = probe
    i0 = round(x / a11)
    j0 = round((y - i0 * a12) / a22)
    dz = (z - i0 * a13 - j0 * a23) % a33
    dz = min(dz, a33 - dz)
    best = abs(x - i0 * a11) ** p + abs(y - i0 * a12 - j0 * a22) ** p + dz**p
    w = int(math.ceil(best ** (1.0 / p))) + 1
    for i in range(math.ceil((x - w) / a11), math.floor((x + w) / a11) + 1):
        dx = abs(x - i * a11)
        if dx**p > best:
            continue
        yy = y - i * a12
        for j in range(math.ceil((yy - w) / a22), math.floor((yy + w) / a22) + 1):
            dy = abs(yy - j * a22)
            if dx**p + dy**p > best:
                continue
            dz = (z - i * a13 - j * a23) % a33
            dz = min(dz, a33 - dz)
            best = min(best, dx**p + dy**p + dz**p)
    return best


def brute_dist_pow(hnf, p, probe):
    if len(hnf) == 2:
        return brute_dist_pow_2d(hnf, p, probe[0], probe[1])
    if len(hnf) == 3:
        return brute_dist_pow_3d(hnf, p, probe)
    raise NotImplementedError


def brute_covering_pow(hnf, p):
    """Max over one full residue system of the distance to the lattice."""
    diag = [hnf[k][k] for k in range(len(hnf))]
    best = 0
    if len(hnf) == 2:
        for x in range(diag[0]):
            for y in range(diag[1]):
                best = max(best, brute_dist_pow_2d(hnf, p, x, y))
    else:
        for x in range(diag[0]):
            for y in range(diag[1]):
                for z in range(diag[2]):
                    best = max(best, brute_dist_pow_3d(hnf, p, (x, y, z)))
    return best


def _ball_points_brute(n, p, s):
    rr = 0
    while (rr + 1) ** p <= s:
        rr += 1
    rng = range(-rr, rr + 1)
    return [
        pt
        for pt in product(rng, repeat=n)
        if sum(abs(c) ** p for c in pt) <= s
    ]


def _lattice_vectors_in_box(hnf, reach):
    """All lattice vectors with every coordinate in [-reach, reach]."""
    n = len(hnf)
    out = []
    if n == 2:
        a, b = hnf[0]
        d = hnf[1][1]
        for i in range(-(reach // a) - 1, reach // a + 2):
            vx = i * a
            if abs(vx) > reach:
                continue
            base = i * b
            for j in range(math.floor((-reach - base) / d), math.ceil((reach - base) / d) + 1):
                vy = base + j * d
                if abs(vy) <= reach:
                    out.append((vx, vy))
    else:
        (a11, a12, a13), (_, a22, a23), (_, _, a33) = hnf
        for i in range(-(reach // a11) - 1, reach // a11 + 2):
            vx = i * a11
            if abs(vx) > reach:
                continue
            for j in range(
                math.floor((-reach - i * a12) / a22),
                math.ceil((reach - i * a12) / a22) + 1,
            ):
                vy = i * a12 + j * a22
                if abs(vy) > reach:
                    continue
                base = i * a13 + j * a23
                for k in range(
                    math.floor((-reach - base) / a33),
                    math.ceil((reach - base) / a33) + 1,
                ):
                    vz = base + k * a33
                    if abs(vz) <= reach:
                        out.append((vx, vy, vz))
    return out


def brute_balls_disjoint(hnf, p, s):
    """True iff lattice translates of the pow-radius-s ball are pairwise
    disjoint: no nonzero lattice vector may be a difference of two ball
    points (all such differences live in the [-2r, 2r] box)."""
    n = len(hnf)
    ball = _ball_points_brute(n, p, s)
    bset = set(ball)
    rr = 0
    while (rr + 1) ** p <= s:
        rr += 1
    for v in _lattice_vectors_in_box(hnf, 2 * rr):
        if all(c == 0 for c in v):
            continue
        if any(tuple(q + w for q, w in zip(pt, v)) in bset for pt in ball):
            return False
    return True


def brute_packing_pow(hnf, p, dset_elements):
    """Largest attainable s with disjoint balls, by direct descent."""
    last = 0
    for s in dset_elements:
        if not brute_balls_disjoint(hnf, p, s):
            return last
        last = s
    raise AssertionError("distance-set prefix exhausted while still disjoint")


@pytest.fixture(scope="session")
def tmp_workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")
