"""Finite approximations of self-affine attractors and the exact tile test.

An attractor is the unique compact fixed set of the map
A |-> union over shifts s of M^{-1}(A + s) for an expanding matrix M.  At
depth K it is represented by the truncated expansion sums

    cells(K) = { sum_{k=1..K} M^{K-k} s_k  :  s_k in shifts },

integer vectors when the data is integral; the region M^{-K}(z + B) around
each cell (B a certified bounding box of the attractor) covers the set.
All set bookkeeping is exact; rationals are used wherever a bound feeds a
decision.

The tile test builds the contact matrix on the integer points of G - G and
compares its Perron radius against m = |det M|: radius < m certifies that
integer translates overlap in measure zero (a tile), an eigenvector at
eigenvalue m certifies positive overlap.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from . import lattice
from .lattice import (
    as_int_matrix,
    frac_mat_mul,
    frac_mat_vec,
    inverse_fractions,
    mat_pow,
    mat_vec,
)

DEFAULT_MAX_CELLS = 5_000_000

#: Perron radius within EPS_GAP of m is reported as indeterminate.
EPS_GAP = 1e-6
POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000


class ResourceLimitError(RuntimeError):
    """Construction would exceed the configured cell budget."""


def max_cells_budget() -> int:
    raw = os.environ.get("TILEFORGE_MAX_CELLS", "")
    try:
        return int(raw) if raw else DEFAULT_MAX_CELLS
    except ValueError:
        return DEFAULT_MAX_CELLS


# ---------------------------------------------------------------------------
# shift sets and system normalization
# ---------------------------------------------------------------------------

def _freeze_shifts(shifts, dim):
    """Normalize a shift set to a sorted tuple of int or float tuples."""
    out = []
    integral = True
    for s in shifts:
        vec = tuple(s)
        if len(vec) != dim:
            raise ValueError(f"shift {s!r} has wrong dimension, expected {dim}")
        if all(float(x).is_integer() for x in vec):
            out.append(tuple(int(x) for x in vec))
        else:
            integral = False
            out.append(tuple(float(x) for x in vec))
    if not out:
        raise ValueError("shift set must be nonempty")
    if not integral:
        out = [tuple(float(x) for x in v) for v in out]
    return tuple(sorted(set(out))), integral


def _freeze_matrix(matrix):
    """Accept an integer or real square matrix; return (rows, is_integer)."""
    rows = [tuple(row) for row in matrix]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square")
    integral = all(float(x).is_integer() for r in rows for x in r)
    if integral:
        return as_int_matrix([[int(x) for x in r] for r in rows]), True
    return tuple(tuple(float(x) for x in r) for r in rows), False


def _is_expanding_any(matrix) -> bool:
    eigvals = np.linalg.eigvals(np.array(matrix, dtype=float))
    return bool(np.min(np.abs(eigvals)) > 1.0 + lattice.EIG_TOL)


# ---------------------------------------------------------------------------
# certified bounding boxes
# ---------------------------------------------------------------------------

def bounding_box(matrix, shifts):
    """Per-coordinate bounds on G = {sum M^{-j} s_j}, certified.

    Returns (lo, hi) tuples with lo_i <= x_i <= hi_i for every point of the
    attractor.  Exact rationals for integer input: partial sums of the
    coordinate series with independent shift choices per level, plus a tail
    bound 2 * ||M^{-J}||_inf * P_J * max|s| once ||M^{-J}||_inf <= 1/2.
    """
    m, m_int = _freeze_matrix(matrix)
    sh, s_int = _freeze_shifts(shifts, len(m))
    if m_int and s_int:
        return _bounding_box_exact(m, sh)
    return _bounding_box_float(m, sh)


_BOX_CACHE: dict = {}


def _adjugate(matrix):
    """Integer matrix with matrix^{-1} = adjugate / det."""
    d = lattice.det(matrix)
    minv = inverse_fractions(matrix)
    adj = tuple(tuple(x * d for x in row) for row in minv)
    assert all(x.denominator == 1 for row in adj for x in row)
    return tuple(tuple(int(x) for x in row) for row in adj), d


def _bounding_box_exact(matrix, shifts):
    """Scaled-integer evaluation of the coordinate series with certified tail.

    M^{-j} = adj^j / det^j, so all level sums are integers over det^j and
    only the per-coordinate accumulators are Fractions.
    """
    key = (matrix, shifts)
    if key in _BOX_CACHE:
        return _BOX_CACHE[key]
    d = len(matrix)
    adj, det = _adjugate(matrix)
    smax = max((max(abs(Fraction(x)) for x in s) for s in shifts), default=Fraction(0))
    lo = [Fraction(0)] * d
    hi = [Fraction(0)] * d
    power = adj
    den = det
    norm_sum = Fraction(0)
    half = Fraction(1, 2)
    j = 0
    halved = False
    while True:
        j += 1
        aden = abs(den)
        sgn = 1 if den > 0 else -1
        imgs = [mat_vec(power, s) for s in shifts]
        for i in range(d):
            vals = [sgn * v[i] for v in imgs]
            lo[i] += Fraction(min(vals), aden)
            hi[i] += Fraction(max(vals), aden)
        norm = Fraction(max(sum(abs(x) for x in row) for row in power), aden)
        norm_sum += norm
        if norm <= half:
            halved = True
            # tail of the norm series is at most norm * (2 * norm_sum)
            tail = norm * 2 * norm_sum * smax
            if tail <= Fraction(1, 64) or j >= 200:
                box = (tuple(x - tail for x in lo), tuple(x + tail for x in hi))
                if len(_BOX_CACHE) >= 256:
                    _BOX_CACHE.pop(next(iter(_BOX_CACHE)))
                _BOX_CACHE[key] = box
                return box
        if j >= 200 and not halved:
            raise ValueError("matrix does not appear to be expanding")
        power = lattice.mat_mul(power, adj)
        den *= det


def _bounding_box_float(matrix, shifts):
    d = len(matrix)
    minv = np.linalg.inv(np.array(matrix, dtype=float))
    pts = np.array([[float(x) for x in s] for s in shifts])
    smax = float(np.max(np.abs(pts))) if pts.size else 0.0
    lo = np.zeros(d)
    hi = np.zeros(d)
    power = minv.copy()
    norm_sum = 0.0
    j = 0
    while True:
        j += 1
        imgs = pts @ power.T
        lo += imgs.min(axis=0)
        hi += imgs.max(axis=0)
        norm = float(np.max(np.sum(np.abs(power), axis=1)))
        norm_sum += norm
        if norm <= 0.5:
            tail = norm * 2.0 * norm_sum * smax * 1.001 + 1e-12
            if tail <= 1.0 / 64 or j >= 400:
                return tuple(lo - tail), tuple(hi + tail)
        if j >= 400:
            raise ValueError("matrix does not appear to be expanding")
        power = power @ minv


# ---------------------------------------------------------------------------
# depth-K approximation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AttractorApprox:
    """Depth-K truncation of an attractor as lattice cells.

    Cell z stands for the region M^{-depth}(z + B) with B the certified
    bounding box of the attractor; cells are distinct and sorted.
    """

    matrix: tuple
    shifts: tuple
    depth: int
    cells: tuple
    is_integer: bool

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def real_points(self):
        """Cells mapped back to attractor coordinates through M^{-depth}."""
        if self.is_integer:
            minv = inverse_fractions(self.matrix)
            a = _frac_power(minv, self.depth)
            return [frac_mat_vec(a, z) for z in self.cells]
        a = np.linalg.matrix_power(np.linalg.inv(np.array(self.matrix, float)),
                                   self.depth)
        return [tuple(a @ np.array(z)) for z in self.cells]

    def to_json(self) -> dict:
        """JSON-ready cell list: matrix, shifts, depth and the cells."""
        return {
            "matrix": [list(r) for r in self.matrix],
            "shifts": [list(s) for s in self.shifts],
            "depth": self.depth,
            "cells": [list(z) for z in self.cells],
        }


def _frac_power(minv, k):
    d = len(minv)
    out = tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))
    for _ in range(k):
        out = frac_mat_mul(out, minv)
    return out


_LEVEL_CACHE: dict = {}
_LEVEL_CACHE_LIMIT = 24


def _levels(matrix, shifts):
    key = (matrix, shifts)
    if key not in _LEVEL_CACHE:
        if len(_LEVEL_CACHE) >= _LEVEL_CACHE_LIMIT:
            _LEVEL_CACHE.pop(next(iter(_LEVEL_CACHE)))
        _LEVEL_CACHE[key] = [frozenset([tuple([0] * len(matrix))])]
    return _LEVEL_CACHE[key]


def _cells_at(matrix, shifts, depth, is_integer, max_cells):
    """Frontier construction: level t+1 = {M z + s}, deduplicated."""
    levels = _levels(matrix, shifts)
    d = len(matrix)
    if is_integer:
        def step(z, s):
            return tuple(
                sum(matrix[i][j] * z[j] for j in range(d)) + s[i] for i in range(d)
            )
    else:
        mat = np.array(matrix, dtype=float)

        def step(z, s):
            y = mat @ np.array(z, dtype=float)
            return tuple(round(y[i] + s[i], 12) for i in range(d))

    while len(levels) <= depth:
        prev = levels[-1]
        if len(prev) * len(shifts) > max_cells:
            raise ResourceLimitError(
                f"depth {len(levels)} needs up to {len(prev) * len(shifts)} cells, "
                f"budget is {max_cells} (TILEFORGE_MAX_CELLS)"
            )
        nxt = frozenset(step(z, s) for z in prev for s in shifts)
        levels.append(nxt)
    return levels[depth]


def approximate(matrix, shifts, depth: int, max_cells: Optional[int] = None) -> AttractorApprox:
    """Depth-K approximation of the attractor for (matrix, shifts).

    Work is bounded by a per-level frontier (cells at level t feed level
    t+1), so repeated digit strings are merged as they appear.  Raises
    ResourceLimitError when the frontier would exceed the cell budget.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    m, m_int = _freeze_matrix(matrix)
    sh, s_int = _freeze_shifts(shifts, len(m))
    if not _is_expanding_any(m):
        raise ValueError("matrix must be expanding")
    integral = m_int and s_int
    budget = max_cells if max_cells is not None else max_cells_budget()
    cells = _cells_at(m, sh, depth, integral, budget)
    return AttractorApprox(matrix=m, shifts=sh, depth=depth,
                           cells=tuple(sorted(cells)), is_integer=integral)


# ---------------------------------------------------------------------------
# unit-cell covers
# ---------------------------------------------------------------------------

_COVER_CACHE: dict = {}


def unit_cell_cover(matrix, shifts, level: Optional[int] = None):
    """Integer unit cells meeting the attractor in positive measure (superset).

    Starting from the certified bounding box, the cover is refined through
    `level` subdivision steps: the attractor lies in the union of regions
    M^{-level}(c + B) over the level cells c, and a unit cell survives only
    if its interior meets one of those regions.  Exact rational interval
    arithmetic throughout, so no cell of positive overlap is ever dropped.
    """
    m, m_int = _freeze_matrix(matrix)
    sh, s_int = _freeze_shifts(shifts, len(m))
    if not (m_int and s_int):
        raise ValueError("unit-cell covers require integer data")
    key = (m, sh, level)
    if key in _COVER_CACHE:
        return _COVER_CACHE[key]
    d = len(m)
    lo, hi = _bounding_box_exact(m, sh)
    if level is None:
        level = 1
        while len(sh) ** (level + 1) <= 512:
            level += 1
    cells = _cells_at(m, sh, level, True, max_cells_budget())
    # Scaled integers: M^{-level} = sn / q with sn integral, q = |det|^level.
    adj, det = _adjugate(m)
    power = adj
    den = det
    for _ in range(level - 1):
        power = lattice.mat_mul(power, adj)
        den *= det
    sgn = 1 if den > 0 else -1
    q = abs(den)
    sn = [[sgn * power[i][j] for j in range(d)] for i in range(d)]
    r = 1
    for x in (*lo, *hi):
        r = r * x.denominator // math.gcd(r, x.denominator)
    blo = [int(x * r) for x in lo]
    bhi = [int(x * r) for x in hi]
    big_q = q * r
    # Row-wise contribution of the box B, as numerators over q * r.
    row_lo = [sum(sn[i][j] * (blo[j] if sn[i][j] >= 0 else bhi[j]) for j in range(d))
              for i in range(d)]
    row_hi = [sum(sn[i][j] * (bhi[j] if sn[i][j] >= 0 else blo[j]) for j in range(d))
              for i in range(d)]
    marked = set()
    for c in cells:
        ranges = []
        for i in range(d):
            base = sum(sn[i][j] * c[j] for j in range(d)) * r
            lo_num = base + row_lo[i]
            hi_num = base + row_hi[i]
            first = lo_num // big_q            # least g with g + 1 > lo
            last = (hi_num - 1) // big_q       # greatest g with g < hi
            if last < first:
                ranges = None
                break
            ranges.append(range(first, last + 1))
        if ranges is not None:
            marked.update(product(*ranges))
    cover = tuple(sorted(marked))
    if len(_COVER_CACHE) >= 64:
        _COVER_CACHE.pop(next(iter(_COVER_CACHE)))
    _COVER_CACHE[key] = cover
    return cover


def touched_cells(matrix, shifts, depth: int, level: Optional[int] = None):
    """Unit cells at scale M^{-depth} covering the attractor: cells + cover."""
    approx = approximate(matrix, shifts, depth)
    cover = unit_cell_cover(approx.matrix, approx.shifts, level)
    d = len(approx.matrix)
    touched = set()
    for g in cover:
        for z in approx.cells:
            touched.add(tuple(z[i] + g[i] for i in range(d)))
    return touched


def measure_upper(matrix, digits, depth: int, level: Optional[int] = None) -> Fraction:
    """Upper bound on the Lebesgue measure of the attractor, as a rational.

    Two routes, tightest wins: when the contact-matrix test certifies a
    tile, the measure is exactly one and the bound is the constant 1;
    otherwise the unit cells (at scale M^{-depth}) of the self-similar
    cover are counted and divided by m^depth.  Either way the sequence in
    depth is a non-increasing upper bound converging to the measure.
    """
    m = as_int_matrix(matrix)
    if not lattice.validate_digits(m, digits):
        raise ValueError("digits must form a residue system for the matrix")
    if _tile_report_cached(m, tuple(tuple(int(x) for x in v) for v in digits)).is_tile:
        return Fraction(1)
    touched = touched_cells(m, digits, depth, level)
    return Fraction(len(touched), abs(lattice.det(m)) ** depth)


# ---------------------------------------------------------------------------
# contact matrix and the exact tile test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContactMatrix:
    """Transition counts k -> M k + b - a on candidate overlap translations.

    States are the nonzero integer vectors that can arise as differences of
    two points of the attractor; counts[i][j] is the number of digit pairs
    (a, b) with states[j] = M @ states[i] + b - a.
    """

    states: tuple
    counts: tuple

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class TileReport:
    is_tile: bool
    indeterminate: bool
    spectral_radius: float
    modulus: int
    contact: ContactMatrix
    measure: Optional[int] = None


def _difference_multiset(digits):
    diffs: dict = {}
    for a in digits:
        for b in digits:
            delta = tuple(bi - ai for ai, bi in zip(a, b))
            diffs[delta] = diffs.get(delta, 0) + 1
    return diffs


def _power_radius(counts, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Perron radius of a nonnegative matrix by power iteration.

    Iterates on T + I, which is aperiodic, shares the Perron vector of T,
    and has radius rho(T) + 1, so contact graphs that are unions of cycles
    (common here) still converge.  Deterministic all-ones start.  Returns
    (radius, vector, converged).
    """
    n = len(counts)
    if n == 0:
        return 0.0, np.zeros(0), True
    t = np.array(counts, dtype=float) + np.eye(n)
    x = np.ones(n)
    lam = 0.0
    for _ in range(max_iter):
        y = t @ x
        ny = float(np.max(y))
        if ny == 0.0:
            return 0.0, x, True
        y /= ny
        if abs(ny - lam) <= tol * max(1.0, ny) and float(np.max(np.abs(y - x))) <= tol:
            return max(ny - 1.0, 0.0), y, True
        x, lam = y, ny
    return max(lam - 1.0, 0.0), x, False


def contact_matrix(matrix, digits) -> ContactMatrix:
    """Contact matrix on the integer points of G - G (zero excluded).

    Candidate states come from the certified per-coordinate bounds on
    sums sum M^{-j} c_j with c_j in D - D; the candidate window is then
    pruned to its greatest fixed point under "k keeps some successor
    M k + b - a inside the set", which is exactly the set of integer
    vectors representable as such sums.
    """
    m = as_int_matrix(matrix)
    d = len(m)
    diffs = _difference_multiset(digits)
    lo, hi = _bounding_box_exact(m, tuple(sorted(diffs)))
    ranges = []
    for lo_i, hi_i in zip(lo, hi):
        a = -int((-lo_i) // 1)  # ceil(lo)
        b = int(hi_i // 1)      # floor(hi)
        if b < a:
            return ContactMatrix(states=(), counts=())
        ranges.append(range(a, b + 1))
    zero = tuple([0] * d)
    states = {k for k in product(*ranges) if k != zero}
    delta_list = list(diffs)
    # Greatest fixed point: keep states with at least one in-window successor.
    while True:
        survivors = set()
        for k in states:
            mk = mat_vec(m, k)
            for delta in delta_list:
                succ = tuple(mk[i] + delta[i] for i in range(d))
                if succ in states:
                    survivors.add(k)
                    break
        if survivors == states:
            break
        states = survivors
    order = sorted(states)
    index = {k: i for i, k in enumerate(order)}
    counts = [[0] * len(order) for _ in order]
    for k in order:
        mk = mat_vec(m, k)
        row = counts[index[k]]
        for delta, mult in diffs.items():
            succ = tuple(mk[i] + delta[i] for i in range(d))
            j = index.get(succ)
            if j is not None:
                row[j] += mult
    return ContactMatrix(states=tuple(order),
                         counts=tuple(tuple(r) for r in counts))


_TILE_REPORT_CACHE: dict = {}


def _tile_report_cached(matrix, digits) -> "TileReport":
    key = (matrix, digits)
    if key not in _TILE_REPORT_CACHE:
        if len(_TILE_REPORT_CACHE) >= 256:
            _TILE_REPORT_CACHE.pop(next(iter(_TILE_REPORT_CACHE)))
        _TILE_REPORT_CACHE[key] = tile_check_exact(matrix, digits)
    return _TILE_REPORT_CACHE[key]


def tile_check_exact(matrix, digits, eps_gap: float = EPS_GAP) -> TileReport:
    """Decide whether the digit system generates a tile (measure one).

    Builds the contact matrix and compares its Perron radius rho with
    m = |det M|: rho < m - eps_gap certifies measure one; an eigenvector at
    eigenvalue m certifies overlapping translates.  Near-threshold results
    without a certificate are reported as indeterminate rather than guessed.
    """
    m = as_int_matrix(matrix)
    if not lattice.is_expanding(m):
        raise ValueError("matrix must be expanding")
    if not lattice.validate_digits(m, digits):
        raise ValueError("digits must form a residue system for the matrix")
    modulus = abs(lattice.det(m))
    contact = contact_matrix(m, digits)
    if len(contact) == 0:
        return TileReport(is_tile=True, indeterminate=False, spectral_radius=0.0,
                          modulus=modulus, contact=contact, measure=1)
    rho, vec, converged = _power_radius(contact.counts)
    if converged and rho < modulus - eps_gap:
        return TileReport(is_tile=True, indeterminate=False, spectral_radius=rho,
                          modulus=modulus, contact=contact, measure=1)
    # Certify positive overlap: eigenvector residual at eigenvalue m.
    t = np.array(contact.counts, dtype=float)
    scale = float(np.max(vec)) or 1.0
    residual = float(np.max(np.abs(t @ vec - modulus * vec))) / (modulus * scale)
    if rho >= modulus - eps_gap and residual <= 1e-6:
        return TileReport(is_tile=False, indeterminate=False, spectral_radius=rho,
                          modulus=modulus, contact=contact)
    return TileReport(is_tile=False, indeterminate=True, spectral_radius=rho,
                      modulus=modulus, contact=contact)


# ---------------------------------------------------------------------------
# self-similarity and covering layers
# ---------------------------------------------------------------------------

def self_similarity_residual(approx: AttractorApprox) -> float:
    """Symmetric-difference fraction between two routes to cells(K).

    cells(K) as built (last-digit recursion M z + s) is compared against
    the first-digit reconstruction {M^{K-1} s + z' : z' in cells(K-1)}.
    The two agree identically for exact integer data; for real shift sets
    the value measures accumulated floating-point drift.
    """
    if approx.depth < 2:
        raise ValueError("self-similarity residual needs depth >= 2")
    side1 = set(approx.cells)
    prev = approximate(approx.matrix, approx.shifts, approx.depth - 1)
    d = approx.dim
    if approx.is_integer:
        mk = mat_pow(approx.matrix, approx.depth - 1)
        lead = [mat_vec(mk, s) for s in approx.shifts]
        side2 = {tuple(z[i] + t[i] for i in range(d))
                 for z in prev.cells for t in lead}
    else:
        mk = np.linalg.matrix_power(np.array(approx.matrix, float), approx.depth - 1)
        lead = [mk @ np.array(s, float) for s in approx.shifts]
        side2 = {tuple(round(z[i] + t[i], 12) for i in range(d))
                 for z in prev.cells for t in lead}
    union = side1 | side2
    return len(side1 ^ side2) / len(union)


def shift_cover_layers(approx: AttractorApprox, window=None, per_cell: bool = False):
    """Histogram of covering multiplicities of integer translates.

    Every unit cell (at scale M^{-depth}) lying inside `window` is tested
    against all integer translates of the attractor cover; the returned
    histogram maps layer count -> number of cells.  For a tile the dominant
    count is 1, with deviations confined to cells near the boundary of the
    cover.  `window` is a per-coordinate (lo, hi) integer box, default the
    unit cube.
    """
    if not approx.is_integer:
        raise ValueError("covering layers require integer data")
    d = approx.dim
    if window is None:
        window = tuple((0, 1) for _ in range(d))
    window = tuple((int(a), int(b)) for a, b in window)
    if any(b <= a for a, b in window):
        raise ValueError("window must have positive extent in every coordinate")
    # A certified tile admits an exact one-layer stand-in: its cells are a
    # complete residue system mod M^depth.  Otherwise count against the
    # geometric unit-cell cover, where boundary cells may deviate.
    if (lattice.validate_digits(approx.matrix, approx.shifts)
            and _tile_report_cached(approx.matrix, approx.shifts).is_tile):
        touched = set(approx.cells)
    else:
        cover = unit_cell_cover(approx.matrix, approx.shifts)
        touched = set()
        for g in cover:
            for z in approx.cells:
                touched.add(tuple(z[i] + g[i] for i in range(d)))
    minv = inverse_fractions(approx.matrix)
    a = _frac_power(minv, approx.depth)
    # Interval of the mapped unit cell A(c + [0,1]^d) along coordinate i is
    # [base_i + row_neg_i, base_i + row_pos_i].
    row_neg = [sum(min(a[i][j], 0) for j in range(d)) for i in range(d)]
    row_pos = [sum(max(a[i][j], 0) for j in range(d)) for i in range(d)]
    # Candidate sample cells from the corners of M^depth(window).
    mk = mat_pow(approx.matrix, approx.depth)
    corners = [mat_vec(mk, c) for c in product(*[(lo, hi) for lo, hi in window])]
    ranges = [range(min(c[i] for c in corners) - 1, max(c[i] for c in corners) + 1)
              for i in range(d)]
    samples = []
    for c in product(*ranges):
        base = frac_mat_vec(a, c)
        if all(window[i][0] <= base[i] + row_neg[i]
               and base[i] + row_pos[i] <= window[i][1] for i in range(d)):
            samples.append(c)
    if not samples:
        raise ValueError("window too small: no unit cell fits inside it at this depth")
    # Translate range big enough that every translate meeting the window appears.
    lo_b, hi_b = _bounding_box_exact(approx.matrix, approx.shifts)
    t_ranges = [range(int((window[i][0] - hi_b[i]) // 1),
                      -int(-(window[i][1] - lo_b[i]) // 1) + 1) for i in range(d)]
    shifted = [mat_vec(mk, t) for t in product(*t_ranges)]
    per = {}
    for c in samples:
        layers = 0
        for mt in shifted:
            if tuple(c[i] - mt[i] for i in range(d)) in touched:
                layers += 1
        per[c] = layers
    hist = {}
    for v in per.values():
        hist[v] = hist.get(v, 0) + 1
    if per_cell:
        return hist, per
    return hist


# ---------------------------------------------------------------------------
# rasterization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Raster:
    """Axis-aligned occupancy grid: origin, cell size 1/resolution, counts."""

    origin: tuple
    cell_size: Fraction
    extent: tuple
    occupancy: np.ndarray

    def occupied(self):
        """Sorted tuple of occupied index vectors."""
        return tuple(sorted(map(tuple, np.argwhere(self.occupancy > 0).tolist())))

    @property
    def occupied_count(self) -> int:
        return int(np.count_nonzero(self.occupancy))


def rasterize(approx: AttractorApprox, resolution: int, box=None) -> Raster:
    """Mark the raster cells hit by the real-mapped cells of the approximation.

    `resolution` is the number of raster cells per unit length.  `box`
    overrides the certified bounding box (pass a shared box to compare
    rasters across systems cell-exactly).
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    d = approx.dim
    if box is None:
        lo, hi = bounding_box(approx.matrix, approx.shifts)
    else:
        lo, hi = box
        lo = tuple(Fraction(x) if approx.is_integer else float(x) for x in lo)
        hi = tuple(Fraction(x) if approx.is_integer else float(x) for x in hi)
    extent = []
    for i in range(d):
        n = -int(-((hi[i] - lo[i]) * resolution) // 1)
        extent.append(max(int(n), 1))
    occupancy = np.zeros(tuple(extent), dtype=np.int64)
    if approx.is_integer:
        minv = inverse_fractions(approx.matrix)
        a = _frac_power(minv, approx.depth)
        for z in approx.cells:
            x = frac_mat_vec(a, z)
            idx = []
            for i in range(d):
                k = int(((x[i] - lo[i]) * resolution) // 1)
                idx.append(min(max(k, 0), extent[i] - 1))
            occupancy[tuple(idx)] += 1
    else:
        a = np.linalg.matrix_power(np.linalg.inv(np.array(approx.matrix, float)),
                                   approx.depth)
        lo_f = np.array([float(x) for x in lo])
        for z in approx.cells:
            x = a @ np.array(z, float)
            idx = np.floor((x - lo_f) * resolution).astype(int)
            idx = np.clip(idx, 0, np.array(extent) - 1)
            occupancy[tuple(idx)] += 1
    return Raster(origin=tuple(lo), cell_size=Fraction(1, resolution),
                  extent=tuple(extent), occupancy=occupancy)
