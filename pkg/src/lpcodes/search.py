"""Exhaustive search for perfect and low-imperfection lattice codes.

For each volume M the packing radius of any surviving code is forced:
s_r = max{s in D : mu(s) <= M}.  A code passes the injectivity test at
s_r exactly when no nonzero difference of two ball points lies in the
lattice, so instead of labeling every ball point for every candidate
basis, the difference set is computed once per (n, p, s_r) and each
difference is turned into a congruence constraint on the Hermite normal
form entries.  Marking those constraints on the entry grid eliminates
almost all of the d2 * d3^2 candidates per volume without constructing
them.  Survivors then face the covering test at the successor radius
(quasi-perfect) or the exact-count check (perfect), and every reported
hit is re-verified by the full per-lattice analysis.

Volumes are independent, so the search parallelizes over them; results
are merged in volume order and finally sorted, making reports identical
regardless of worker count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cache
from math import gcd
from typing import Callable, Iterator, Sequence

import numpy as np

from .analysis import CodeAnalysis, analyze, labels_are_distinct
from .balls import ball_points, mu, successor
from .lattices import (
    Basis,
    canonical_form,
    coset_label,
    det,
    enumerate_sublattices,
    hnf,
    sublattice_count,
)


def injectivity_test(basis: Sequence[Sequence[int]], p: int, s: int) -> bool:
    """True iff lattice translates of the ball of pow-radius s are
    pairwise disjoint (all ball points land in distinct cosets).

    Returns False immediately when mu(n,p,s) exceeds the volume; the
    pigeonhole makes enumeration pointless.
    """
    h = hnf(basis)
    return labels_are_distinct(h, p, s, det(h))


def covering_test(basis: Sequence[Sequence[int]], p: int, s: int) -> bool:
    """True iff every coset representative lies within pow-distance s of
    the lattice.

    Computed through labels: a point x has a lattice point within s iff
    some ball point b satisfies x - b in the lattice, i.e. iff x's coset
    label occurs among the ball labels.  Coverage therefore holds iff
    the ball points hit all det distinct labels.
    """
    h = hnf(basis)
    volume = det(h)
    n = len(h)
    if mu(n, p, s) < volume:
        return False
    labels = {coset_label(h, pt) for pt in ball_points(n, p, s)}
    return len(labels) == volume


def algorithm_radii(n: int, p: int, volume: int) -> tuple[int, int]:
    """(s_r, s_R): the largest pow-radius whose ball has at most `volume`
    points, and its distance-set successor."""
    s = 0
    nxt = successor(n, p, 0)
    while mu(n, p, nxt) <= volume:
        s = nxt
        nxt = successor(n, p, nxt)
    return s, nxt


@cache
def _ball_diffs(n: int, p: int, s: int) -> np.ndarray:
    """Nonzero differences of ball-point pairs, one representative per
    {v, -v} pair (first nonzero coordinate positive), as an int64 array."""
    pts = np.asarray(ball_points(n, p, s), dtype=np.int64).reshape(-1, n)
    blocks = []
    step = 512
    for i in range(0, len(pts), step):
        d = (pts[i : i + step, None, :] - pts[None, :, :]).reshape(-1, n)
        blocks.append(np.unique(d, axis=0))
    diffs = np.unique(np.vstack(blocks), axis=0)
    nonzero = diffs != 0
    first = np.argmax(nonzero, axis=1)
    lead = diffs[np.arange(len(diffs)), first]
    keep = nonzero.any(axis=1) & (lead > 0)
    out = diffs[keep]
    out.setflags(write=False)
    return out


def _factor_pairs(volume: int) -> Iterator[tuple[int, int]]:
    for d1 in range(1, volume + 1):
        if volume % d1 == 0:
            yield d1, volume // d1


def _stride_classes(
    cr: np.ndarray, vr: np.ndarray, modulus: int
) -> Iterator[tuple[int, int]]:
    """Solve cr * a == vr (mod modulus) for each unique residue pair,
    yielding (start, step) arithmetic progressions of solutions a."""
    codes = np.unique(cr * modulus + vr)
    for code in codes.tolist():
        c, v = divmod(code, modulus)
        g = gcd(c, modulus)
        if v % g:
            continue
        step = modulus // g
        start = (pow(c // g, -1, step) * (v // g)) % step
        yield start, step


def _survivors_1d(volume: int, diffs: np.ndarray) -> Iterator[Basis]:
    if not (diffs[:, 0] % volume == 0).any():
        yield ((volume,),)


def _survivors_2d(volume: int, diffs: np.ndarray) -> Iterator[Basis]:
    x, y = diffs[:, 0], diffs[:, 1]
    for d1, d2 in _factor_pairs(volume):
        m = x % d1 == 0
        bad = np.zeros(d2, dtype=bool)
        if m.any():
            c1 = (x[m] // d1) % d2
            yr = y[m] % d2
            for start, step in _stride_classes(c1, yr, d2):
                bad[start::step] = True
                if step == 1:
                    break
        for a12 in np.flatnonzero(~bad).tolist():
            yield ((d1, int(a12)), (0, d2))


def _mark_line(grid: np.ndarray, s: int, t: int, w: int, d3: int) -> bool:
    """Mark the solutions of s*a13 + t*a23 == w (mod d3) on grid; returns
    True when the whole grid became bad (caller may stop early)."""
    if s == 0 and t == 0:
        if w == 0:
            grid[:, :] = True
            return True
        return False
    if t == 0:
        g = gcd(s, d3)
        if w % g:
            return False
        step = d3 // g
        start = (pow(s // g, -1, step) * (w // g)) % step
        grid[start::step, :] = True
        return bool(step == 1)
    g = gcd(t, d3)
    step = d3 // g
    inv = pow(t // g, -1, step)
    a13 = np.arange(d3, dtype=np.int64)
    rhs = (w - s * a13) % d3
    ok = rhs % g == 0
    if not ok.any():
        return False
    base = (inv * (rhs[ok] // g)) % step
    rows = a13[ok]
    for j in range(g):
        grid[rows, base + j * step] = True
    return False


def _survivors_3d(volume: int, diffs: np.ndarray) -> Iterator[Basis]:
    x, y, z = diffs[:, 0], diffs[:, 1], diffs[:, 2]
    for d1, rest in _factor_pairs(volume):
        m = x % d1 == 0
        c1_all, y_all, z_all = x[m] // d1, y[m], z[m]
        for d2, d3 in _factor_pairs(rest):
            if not len(c1_all):
                for a12 in range(d2):
                    for a13 in range(d3):
                        for a23 in range(d3):
                            yield ((d1, a12, a13), (0, d2, a23), (0, 0, d3))
                continue
            c1r = c1_all % d2
            yr = y_all % d2
            # Solvability of c1*a12 == y (mod d2) depends only on the
            # residues, so solve once per residue class and fan the
            # (start, step) progression back out to the actual vectors.
            codes = c1r * d2 + yr
            uniq, inverse = np.unique(codes, return_inverse=True)
            starts = np.full(len(uniq), -1, dtype=np.int64)
            steps = np.zeros(len(uniq), dtype=np.int64)
            for k, code in enumerate(uniq.tolist()):
                c, v = divmod(code, d2)
                g = gcd(c, d2)
                if v % g:
                    continue
                step = d2 // g
                steps[k] = step
                starts[k] = (pow(c // g, -1, step) * (v // g)) % step
            vstart = starts[inverse]
            vstep = steps[inverse]
            idx = np.flatnonzero(vstart >= 0)
            # (vector, a12) incidence pairs; each solvable vector has
            # g = d2/step solutions a12 = start + j*step.
            reps = d2 // vstep[idx]
            pair_vec = np.repeat(idx, reps)
            if len(reps):
                offs = np.concatenate(
                    [np.arange(r, dtype=np.int64) for r in reps.tolist()]
                )
            else:
                offs = np.zeros(0, dtype=np.int64)
            pair_a12 = vstart[pair_vec] + offs * vstep[pair_vec]
            c1p = c1_all[pair_vec]
            c2p = (y_all[pair_vec] - c1p * pair_a12) // d2
            sline = c1p % d3
            tline = c2p % d3
            wline = z_all[pair_vec] % d3
            order = np.argsort(pair_a12, kind="stable")
            pair_a12 = pair_a12[order]
            lines = np.stack([sline[order], tline[order], wline[order]], axis=1)
            bounds = np.searchsorted(
                pair_a12, np.arange(d2 + 1, dtype=np.int64)
            )
            grid = np.zeros((d3, d3), dtype=bool)
            for a12 in range(d2):
                lo, hi = bounds[a12], bounds[a12 + 1]
                if lo == hi:
                    for a13 in range(d3):
                        for a23 in range(d3):
                            yield ((d1, a12, a13), (0, d2, a23), (0, 0, d3))
                    continue
                grid[:, :] = False
                dead = False
                for s_, t_, w_ in np.unique(lines[lo:hi], axis=0).tolist():
                    if _mark_line(grid, int(s_), int(t_), int(w_), d3):
                        dead = True
                        break
                if dead:
                    continue
                for a13, a23 in np.argwhere(~grid).tolist():
                    yield (
                        (d1, a12, int(a13)),
                        (0, d2, int(a23)),
                        (0, 0, d3),
                    )


_SIEVES: dict[int, Callable[[int, np.ndarray], Iterator[Basis]]] = {
    1: _survivors_1d,
    2: _survivors_2d,
    3: _survivors_3d,
}


@dataclass(frozen=True)
class SearchQuery:
    n: int
    p: int
    volume_min: int
    volume_max: int
    t_max: int | None = 1
    dedupe: bool = True

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.p < 1:
            raise ValueError("p must be a positive integer")
        if not 1 <= self.volume_min <= self.volume_max:
            raise ValueError("need 1 <= volume_min <= volume_max")
        if self.t_max is not None and self.t_max < 0:
            raise ValueError("t_max must be nonnegative (or None for no cap)")


@dataclass(frozen=True)
class SearchCounts:
    enumerated: int
    injectivity_survivors: int
    covering_survivors: int


@dataclass(frozen=True)
class SearchReport:
    query: SearchQuery
    hits: tuple[tuple[Basis, CodeAnalysis], ...]
    counts: SearchCounts
    bound_provenance: str


def _identity_basis(n: int) -> Basis:
    return tuple(
        tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
    )


def _fast_volume(
    n: int, p: int, volume: int, t_max: int
) -> tuple[list[Basis], int, int]:
    """Hit bases (not yet analyzed) for one volume on the fast path,
    plus injectivity and covering survivor counts."""
    s_r, s_R = algorithm_radii(n, p, volume)
    if s_r == 0:
        # Packing radius zero: only the trivial tiling by Z^n itself is
        # reported; degenerate radius-0 "codes" at larger volumes are not.
        if volume == 1:
            return [_identity_basis(n)], 1, 1
        return [], 0, 0
    bijective = mu(n, p, s_r) == volume
    if t_max == 0 and not bijective:
        return [], 0, 0
    diffs = _ball_diffs(n, p, s_r)
    sieve = _SIEVES.get(n)
    inj = 0
    hits: list[Basis] = []
    if sieve is not None:
        for basis in sieve(volume, diffs):
            inj += 1
            if bijective or covering_test(basis, p, s_R):
                hits.append(basis)
    else:
        for basis in enumerate_sublattices(n, volume):
            if not injectivity_test(basis, p, s_r):
                continue
            inj += 1
            if bijective or covering_test(basis, p, s_R):
                hits.append(basis)
    return hits, inj, len(hits)


def _volume_task(
    args: tuple[int, int, int, int | None]
) -> tuple[int, list[tuple[Basis, CodeAnalysis]], SearchCounts, int]:
    """Process one volume; returns (volume, analyzed hits, counts, millis)."""
    n, p, volume, t_max = args
    begin = time.monotonic()
    fast = t_max is not None and t_max <= 1
    if fast:
        bases, inj, cov = _fast_volume(n, p, volume, t_max)
        enumerated = sublattice_count(n, volume)
        expected_t = 0 if mu(n, p, algorithm_radii(n, p, volume)[0]) == volume else 1
    else:
        bases = list(enumerate_sublattices(n, volume))
        enumerated = inj = len(bases)
        cov = 0
        expected_t = -1
    hits: list[tuple[Basis, CodeAnalysis]] = []
    for basis in bases:
        canon = canonical_form(basis)
        a = analyze(canon, p)
        if fast:
            # Fast-path verdicts are re-proved by the full analysis.
            assert a.t == expected_t, (basis, a.t, expected_t)
        elif t_max is not None and a.t > t_max:
            continue
        assert a.mu_r <= a.det <= a.mu_R, (basis, a)
        hits.append((canon, a))
    if not fast:
        cov = len(hits)
    millis = int((time.monotonic() - begin) * 1000.0)
    return volume, hits, SearchCounts(enumerated, inj, cov), millis


def dedupe_congruence(bases: Sequence[Basis]) -> list[Basis]:
    """One representative (the canonical form) per congruence class,
    stable-sorted by (determinant, canonical entries)."""
    seen: dict[Basis, int] = {}
    for b in bases:
        c = canonical_form(b)
        assert det(c) == abs(det(hnf(b)))
        seen.setdefault(c, det(c))
    return sorted(seen, key=lambda c: (seen[c], c))


def load_checkpoint(path: str) -> dict[int, tuple[int, int]]:
    """Parse a checkpoint file into {volume: (hit count, millis)}.

    Lines are `M<TAB>hits<TAB>millis`; on duplicates the last line wins
    (resumed runs append fresh lines for recomputed volumes).
    """
    out: dict[int, tuple[int, int]] = {}
    if not os.path.exists(path):
        return out
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            m, h, ms = line.split("\t")
            out[int(m)] = (int(h), int(ms))
    return out


def run_search(
    query: SearchQuery,
    jobs: int | None = None,
    checkpoint: str | None = None,
) -> SearchReport:
    """Execute the query; see module docstring for strategy.

    jobs defaults to the QP_JOBS environment variable, else 1.  With a
    checkpoint path, volumes recorded there with zero hits are skipped
    outright and hit-bearing ones are recomputed (the analysis objects
    are not persisted); each completed volume appends one line.
    """
    if jobs is None:
        jobs = int(os.environ.get("QP_JOBS", "1"))
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    done = load_checkpoint(checkpoint) if checkpoint else {}
    volumes = list(range(query.volume_min, query.volume_max + 1))
    skipped = [m for m in volumes if m in done and done[m][0] == 0]
    todo = [m for m in volumes if m not in done or done[m][0] != 0]
    tasks = [(query.n, query.p, m, query.t_max) for m in todo]
    results: dict[int, tuple[list[tuple[Basis, CodeAnalysis]], SearchCounts, int]] = {}
    ck = open(checkpoint, "a", encoding="utf-8") if checkpoint else None

    def consume(produced) -> None:
        for volume, hits, counts, millis in produced:
            results[volume] = (hits, counts, millis)
            if ck is not None:
                ck.write(f"{volume}\t{len(hits)}\t{millis}\n")
                ck.flush()

    try:
        if jobs == 1 or len(tasks) <= 1:
            consume(map(_volume_task, tasks))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                consume(pool.map(_volume_task, tasks, chunksize=4))
    finally:
        if ck is not None:
            ck.close()
    all_hits: list[tuple[Basis, CodeAnalysis]] = []
    enumerated = inj = cov = 0
    for m in volumes:
        if m in results:
            hits, counts, _ = results[m]
            all_hits.extend(hits)
            enumerated += counts.enumerated
            inj += counts.injectivity_survivors
            cov += counts.covering_survivors
        else:
            enumerated += sublattice_count(query.n, m)
    if query.dedupe:
        merged: dict[Basis, CodeAnalysis] = {}
        for basis, a in all_hits:
            merged.setdefault(basis, a)
        all_hits = list(merged.items())
    all_hits.sort(key=lambda item: (item[1].det, item[0]))
    provenance = (
        f"volume range [{query.volume_min}, {query.volume_max}] supplied by caller"
    )
    if skipped:
        provenance += (
            f"; resumed from checkpoint, {len(skipped)} zero-hit volumes skipped"
            " (survivor counts cover recomputed volumes only)"
        )
    return SearchReport(
        query=query,
        hits=tuple(all_hits),
        counts=SearchCounts(enumerated, inj, cov),
        bound_provenance=provenance,
    )


def _fraction_str(fr) -> str:
    return f"{fr.numerator}/{fr.denominator}"


def analysis_display(a: CodeAnalysis) -> dict:
    """Serializable view of one analysis: exact integers, densities as
    num/den strings, real quantities rounded to 4 decimals."""
    return {
        "n": a.n,
        "p": a.p,
        "basis": [list(row) for row in a.hnf_basis],
        "det": a.det,
        "t": a.t,
        "r_pow": a.r_pow,
        "R_pow": a.R_pow,
        "r": round(a.r_pow ** (1.0 / a.p), 4),
        "R": round(a.R_pow ** (1.0 / a.p), 4),
        "mu_r": a.mu_r,
        "mu_R": a.mu_R,
        "disc_pack_density": _fraction_str(a.disc_pack_density),
        "disc_cover_density": _fraction_str(a.disc_cover_density),
        "shortest_pow": a.shortest_pow,
        "real_pack_radius": round(a.real_pack_radius, 4),
        "real_pack_density": round(a.real_pack_density, 4),
        "real_cover_radius": (
            None if a.real_cover_radius is None else round(a.real_cover_radius, 4)
        ),
        "real_cover_density": (
            None if a.real_cover_density is None else round(a.real_cover_density, 4)
        ),
    }


def report_to_dict(report: SearchReport) -> dict:
    q = report.query
    return {
        "query": {
            "n": q.n,
            "p": q.p,
            "volume_min": q.volume_min,
            "volume_max": q.volume_max,
            "t_max": q.t_max,
            "dedupe": q.dedupe,
        },
        "counts": {
            "enumerated": report.counts.enumerated,
            "injectivity_survivors": report.counts.injectivity_survivors,
            "covering_survivors": report.counts.covering_survivors,
        },
        "bound_provenance": report.bound_provenance,
        "hits": [
            {"basis": [list(row) for row in basis], "analysis": analysis_display(a)}
            for basis, a in report.hits
        ],
    }


CSV_FIELDS = (
    "det",
    "basis",
    "t",
    "r_pow",
    "R_pow",
    "r",
    "R",
    "mu_r",
    "mu_R",
    "disc_pack_density",
    "disc_cover_density",
    "shortest_pow",
    "real_pack_radius",
    "real_pack_density",
    "real_cover_radius",
    "real_cover_density",
)


def compact_basis(basis: Basis) -> str:
    return ";".join(",".join(str(v) for v in row) for row in basis)


def report_csv_rows(report: SearchReport) -> list[dict]:
    rows = []
    for basis, a in report.hits:
        d = analysis_display(a)
        d["basis"] = compact_basis(basis)
        rows.append({k: d[k] for k in CSV_FIELDS})
    return rows
