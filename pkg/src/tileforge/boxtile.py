"""Box attractors: cyclic-form matrices, box digit sets, and a box detector.

An irreducible attractor that is a parallelepiped arises, in a suitable
integer basis, from the cyclic matrix with superdiagonal p_1 .. p_{n-1} and
corner +-p_n; the matching digit set is the grid {0..p_1-1} x ... x
{0..p_n-1} (last axis signed), and the attractor it generates is an exact
box.  The reverse decision for an arbitrary matrix is out of scope: only
genuinely monomial matrices are classified, via their permutation/cycle
structure.  A numeric classifier decides "is this approximated attractor a
parallelepiped" from the convex hull of its cells against the best-fitting
parallelepiped spanned by hull facet directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import NamedTuple, Optional

import numpy as np

from . import lattice
from .attractor import AttractorApprox, unit_cell_cover
from .lattice import as_int_matrix


class NotMonomialError(ValueError):
    """Matrix has a column with other than exactly one nonzero entry."""


class DegeneratePointCloudError(ValueError):
    """Point cloud spans less than the full dimension."""


@dataclass(frozen=True)
class BoxForm:
    """Cyclic normal form data: edge split counts p and the corner sign.

    Not all p_i may equal 1 (the matrix would fix a basis vector and fail
    to expand), equivalently prod(p) >= 2.
    """

    p: tuple
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        if not self.p or any(x < 1 for x in self.p):
            raise ValueError("p must be a nonempty tuple of positive integers")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        prod = 1
        for x in self.p:
            prod *= x
        if prod < 2:
            raise ValueError("not all p_i may equal 1 (the matrix would not expand)")

    @property
    def determinant(self) -> int:
        prod = 1
        for x in self.p:
            prod *= x
        return prod * (self.sign if len(self.p) % 2 else self.sign)


def build_cyclic_matrix(form: BoxForm):
    """The cyclic matrix with superdiagonal p_1..p_{n-1} and corner sign*p_n."""
    p = form.p
    n = len(p)
    if n == 1:
        m = ((form.sign * p[0],),)
    else:
        rows = [[0] * n for _ in range(n)]
        for i in range(n - 1):
            rows[i][i + 1] = p[i]
        rows[n - 1][0] = form.sign * p[n - 1]
        m = as_int_matrix(rows)
    if not lattice.is_expanding(m):
        raise ValueError(f"cyclic matrix for {form} is not expanding")
    return as_int_matrix(m)


def box_digits(form: BoxForm):
    """The grid digit set generating an exact box for the cyclic matrix.

    D = {(k_1, ..., k_{n-1}, sign * k_n) : 0 <= k_i < p_i}; contains the
    zero vector, has prod(p) elements, and is a residue system for
    build_cyclic_matrix(form).
    """
    p = form.p
    n = len(p)
    ranges = [range(p[i]) for i in range(n - 1)]
    ranges.append(range(p[n - 1]))
    digits = []
    for ks in product(*ranges):
        vec = list(ks)
        vec[n - 1] *= form.sign
        digits.append(tuple(vec))
    return tuple(sorted(digits))


def tensor_product(matrix1, shifts1, matrix2, shifts2):
    """Block-diagonal matrix and concatenated product shifts.

    The attractor of the result is the cartesian product of the factor
    attractors; when both factors are tiles with digit sets, the product
    shift set is again a residue system.
    """
    m1 = [list(r) for r in matrix1]
    m2 = [list(r) for r in matrix2]
    d1, d2 = len(m1), len(m2)
    block = [[0] * (d1 + d2) for _ in range(d1 + d2)]
    for i in range(d1):
        for j in range(d1):
            block[i][j] = m1[i][j]
    for i in range(d2):
        for j in range(d2):
            block[d1 + i][d1 + j] = m2[i][j]
    shifts = tuple(tuple(s) + tuple(t) for s in shifts1 for t in shifts2)
    return tuple(tuple(r) for r in block), shifts


def suggested_depth(matrix, digits, cell_budget: int = 70000) -> int:
    """Approximation depth for shape detection: enough cells, full rank.

    Picks the smallest depth whose cell count is comfortable for hull work
    and whose cells span the full dimension (digit sets confined to one
    axis need depth >= d before the cell cloud has full rank).
    """
    from .attractor import approximate

    d = len(matrix)
    m = max(len(digits), 2)
    depth = 2
    while m ** (depth + 1) <= 4096 and depth < 8:
        depth += 1
    while m ** depth < 4 ** d and m ** (depth + 1) <= cell_budget:
        depth += 1
    while depth < max(2 * d, 8):
        cells = np.array(approximate(matrix, digits, depth).cells, dtype=float)
        if len(cells) >= 2 and np.linalg.matrix_rank(cells - cells[0]) == d:
            break
        depth += 1
    return depth


class MonomialStructure(NamedTuple):
    """Permutation action of a monomial matrix on the basis directions.

    permutation[j] = i means M e_j = multipliers[j] * e_i; cycles lists the
    orbits.  A single cycle is exactly the irreducible box case.
    """

    permutation: tuple
    multipliers: tuple
    cycles: tuple

    @property
    def is_single_cycle(self) -> bool:
        return len(self.cycles) == 1


def monomial_structure(matrix) -> MonomialStructure:
    """Permutation and multipliers of a monomial matrix.

    Raises NotMonomialError when some column does not have exactly one
    nonzero entry; no change of basis is attempted.
    """
    m = as_int_matrix(matrix)
    d = len(m)
    perm = []
    mult = []
    for j in range(d):
        nonzero = [i for i in range(d) if m[i][j] != 0]
        if len(nonzero) != 1:
            raise NotMonomialError(
                f"column {j} has {len(nonzero)} nonzero entries, expected exactly 1")
        perm.append(nonzero[0])
        mult.append(m[nonzero[0]][j])
    seen = [False] * d
    cycles = []
    for start in range(d):
        if seen[start]:
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        cycles.append(tuple(cyc))
    return MonomialStructure(tuple(perm), tuple(mult), tuple(cycles))


# ---------------------------------------------------------------------------
# numeric parallelepiped detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParallelepipedReport:
    is_box: bool
    edge_vectors: Optional[tuple]
    hull_volume: float
    fit_volume: float
    measure_estimate: float
    interior_estimate: float
    tol: float


def _cell_grid(cells):
    """Dense boolean grid of a cell set, with a one-cell margin.

    Returns (grid, mins); cell z sits at index z - mins + 1.
    """
    arr = np.array(cells, dtype=np.int64)
    mins = arr.min(axis=0)
    spans = arr.max(axis=0) - mins + 3
    grid = np.zeros(tuple(spans), dtype=bool)
    grid[tuple((arr - mins + 1).T)] = True
    return grid, mins


def _corner_cloud(approx: AttractorApprox):
    """Real-mapped corners of the boundary cells of the approximation."""
    from scipy import ndimage

    d = approx.dim
    grid, mins = _cell_grid(approx.cells)
    cross = ndimage.generate_binary_structure(d, 1)
    boundary = grid & ~ndimage.binary_erosion(grid, structure=cross)
    idx = np.argwhere(boundary) + (mins - 1)
    offsets = np.array(list(product((0, 1), repeat=d)), dtype=np.int64)
    corners = (idx[:, None, :] + offsets[None, :, :]).reshape(-1, d)
    # Dedupe on a raveled key; much faster than row-wise unique.
    cmin = corners.min(axis=0)
    span = corners.max(axis=0) - cmin + 1
    keys = np.zeros(len(corners), dtype=np.int64)
    for i in range(d):
        keys = keys * span[i] + (corners[:, i] - cmin[i])
    corners = corners[np.unique(keys, return_index=True)[1]]
    pts = corners.astype(float)
    minv = np.linalg.inv(np.array(approx.matrix, dtype=float))
    a = np.linalg.matrix_power(minv, approx.depth)
    pts = pts @ a.T
    if d >= 4 and len(pts) > 20000:
        # Deterministic subsample, keeping the extremes of every signed
        # coordinate direction so the hull cannot collapse.
        keep = set()
        for sigma in product((-1.0, 1.0), repeat=d):
            proj = pts @ np.array(sigma)
            keep.add(int(np.argmax(proj)))
        stride = len(pts) // 20000 + 1
        keep.update(range(0, len(pts), stride))
        pts = pts[sorted(keep)]
    return pts


def _canonical_normal(n):
    n = n / np.linalg.norm(n)
    for x in n:
        if abs(x) > 1e-12:
            return tuple(np.round(n if x > 0 else -n, 9))
    return tuple(np.round(n, 9))


def _min_parallelepiped(pts, d):
    """Smallest parallelepiped with faces parallel to hull facet directions.

    Returns (hull_volume, fit_volume, edge_vectors).  The optimal enclosing
    parallelepiped of a convex body has its facet directions among the hull
    facet normals for the lattice clouds handled here; we scan d-tuples of
    distinct normals and keep the smallest slab-intersection volume.
    """
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegeneratePointCloudError(str(exc)) from exc
    vertices = pts[hull.vertices]
    normal_count: dict = {}
    for eq in hull.equations:
        key = _canonical_normal(eq[:d])
        normal_count[key] = normal_count.get(key, 0) + 1
    normals = sorted(normal_count, key=lambda k: (-normal_count[k], k))[:64]
    nmat = np.array(normals)
    projs = vertices @ nmat.T
    widths = projs.max(axis=0) - projs.min(axis=0)
    offsets = projs.min(axis=0)
    best = None
    for combo in combinations(range(len(normals)), d):
        sub = nmat[list(combo)]
        det = abs(np.linalg.det(sub))
        if det < 1e-9:
            continue
        vol = float(np.prod(widths[list(combo)])) / det
        if best is None or vol < best[0]:
            best = (vol, combo)
    if best is None:
        raise DegeneratePointCloudError("no independent facet directions found")
    vol, combo = best
    sub = nmat[list(combo)]
    inv = np.linalg.inv(sub)
    edges = tuple(tuple(inv[:, j] * widths[combo[j]]) for j in range(d))
    return float(hull.volume), float(vol), edges


def is_parallelepiped(approx: AttractorApprox, tol: float = 0.05) -> ParallelepipedReport:
    """Decide numerically whether the approximated attractor is a box.

    Two checks at tolerance `tol` (calibrated for depth 8 in dimension <= 3,
    with the cover bracket loosening at shallow depths):

      * the convex hull of the cell corners fills at least (1 - tol) of the
        smallest enclosing parallelepiped spanned by hull facet directions;
      * the hull volume is consistent with the measure bracket from the
        self-similar cover (interior count below, touched count above).

    Dimensions 1..3 use the full boundary-corner cloud; higher dimensions
    subsample it deterministically.
    """
    from scipy import ndimage

    if not approx.is_integer:
        raise ValueError("parallelepiped detection requires integer data")
    d = approx.dim
    rel = np.array(approx.cells, dtype=float)
    if len(rel) < 2 or np.linalg.matrix_rank(rel - rel[0]) < d:
        raise DegeneratePointCloudError(
            "cells span a lower-dimensional subspace; the attractor is degenerate")
    det = abs(lattice.det(approx.matrix))
    scale = det ** approx.depth
    cover = np.array(unit_cell_cover(approx.matrix, approx.shifts), dtype=np.int64)
    arr = np.array(approx.cells, dtype=np.int64)
    lo = arr.min(axis=0) + cover.min(axis=0)
    spans = arr.max(axis=0) + cover.max(axis=0) - lo + 3
    touched = np.zeros(tuple(spans), dtype=bool)
    base = arr - lo + 1
    for g in cover:
        touched[tuple((base + g).T)] = True
    full = np.ones((3,) * d, dtype=bool)
    interior = ndimage.binary_erosion(touched, structure=full)
    vol_hi = int(np.count_nonzero(touched)) / scale
    vol_lo = int(np.count_nonzero(interior)) / scale
    if d == 1:
        zs = [z[0] for z in approx.cells]
        width = (max(zs) - min(zs) + 1) / abs(approx.matrix[0][0]) ** approx.depth
        hull_volume = fit_volume = float(width)
        edges = ((float(width),),)
    else:
        pts = _corner_cloud(approx)
        hull_volume, fit_volume, edges = _min_parallelepiped(pts, d)
    filled = hull_volume >= (1.0 - tol) * fit_volume
    consistent = (vol_lo <= hull_volume * (1.0 + tol)
                  and hull_volume <= vol_hi * (1.0 + tol))
    return ParallelepipedReport(
        is_box=bool(filled and consistent),
        edge_vectors=edges if (filled and consistent) else None,
        hull_volume=float(hull_volume),
        fit_volume=float(fit_volume),
        measure_estimate=float(vol_hi),
        interior_estimate=float(vol_lo),
        tol=tol,
    )
