"""Haar-type wavelet generators built from a tile and their inner products.

A tile with m digits yields m - 1 generators

    psi_s(x) = sqrt(m) * sum_k (e_s)_{k+1} * indicator(M^{-1}(G + d_k))(x),

where e_1 .. e_{m-1} is an orthonormal basis of the zero-sum hyperplane in
R^m.  The canonical basis here is the Helmert construction
e_s ~ (1, ..., 1, -s, 0, ..., 0) / sqrt(s(s+1)) whose entries are integer
multiples of a single square root; all zero-mean and orthogonality
statements therefore reduce to integer arithmetic and hold exactly.  Inner
products are evaluated exactly for box tiles (all pieces have volume 1/m)
and by raster quadrature with a reported boundary fraction otherwise.

Piecewise-constant generators cannot exceed L2 smoothness exponent 1/2;
box tiles attain it, which is what makes them the preferred generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from . import lattice
from .attractor import approximate, bounding_box, touched_cells, _tile_report_cached
from .boxtile import NotMonomialError, monomial_structure
from .lattice import as_int_matrix, mat_pow, mat_vec


@dataclass(frozen=True)
class HyperplaneBasis:
    """Orthonormal vectors spanning {x in R^m : sum x_i = 0}.

    `integer_rows[s]` holds the unnormalized integer vector u_s with
    e_s = u_s / sqrt(norm_sq[s]); exact checks use these.
    """

    m: int
    vectors: tuple
    integer_rows: tuple
    norm_sq: tuple


def hyperplane_basis(m: int) -> HyperplaneBasis:
    """Helmert basis of the zero-sum hyperplane, first nonzero entry positive.

    e_s has s leading entries 1/sqrt(s(s+1)), then -s/sqrt(s(s+1)), then
    zeros, for s = 1 .. m-1.
    """
    if m < 2:
        raise ValueError("need at least two digits")
    vectors = []
    integer_rows = []
    norm_sq = []
    for s in range(1, m):
        u = [1] * s + [-s] + [0] * (m - s - 1)
        nsq = s * (s + 1)
        y = 1.0 / math.sqrt(nsq)
        vectors.append(tuple(ui * y for ui in u))
        integer_rows.append(tuple(u))
        norm_sq.append(nsq)
    return HyperplaneBasis(m=m, vectors=tuple(vectors),
                           integer_rows=tuple(integer_rows),
                           norm_sq=tuple(norm_sq))


@dataclass(frozen=True)
class HaarSystem:
    """A tile system plus the piecewise-constant wavelet generators.

    pieces[s] lists, for generator s+1, one (digit index k, coefficient)
    pair per digit; the coefficient is sqrt(m) * (e_{s+1})_{k+1}.  The
    support of every generator is the tile itself.
    """

    matrix: tuple
    digits: tuple
    basis: HyperplaneBasis
    pieces: tuple

    @property
    def m(self) -> int:
        return len(self.digits)

    @property
    def generator_count(self) -> int:
        return self.m - 1


def build_wavelets(matrix, digits, basis: Optional[HyperplaneBasis] = None) -> HaarSystem:
    """Assemble the wavelet system for a validated digit system."""
    m = as_int_matrix(matrix)
    digits = tuple(tuple(int(x) for x in v) for v in digits)
    if not lattice.validate_digits(m, digits):
        raise ValueError("digits must form a residue system for the matrix")
    count = len(digits)
    if basis is None:
        basis = hyperplane_basis(count)
    if basis.m != count:
        raise ValueError(f"basis is for m={basis.m}, digit set has {count}")
    root_m = math.sqrt(count)
    pieces = tuple(
        tuple((k, root_m * basis.vectors[s][k]) for k in range(count))
        for s in range(count - 1)
    )
    return HaarSystem(matrix=m, digits=digits, basis=basis, pieces=pieces)


def wavelet_mean(system: HaarSystem, s: int) -> Fraction:
    """Exact integral of generator s (1-based): zero, by integer cancellation.

    integral psi_s = (sqrt(m)/m) * sum_k (e_s)_{k+1} * mu(G); the integer
    row of e_s sums to zero, so the value is exactly zero whatever mu(G) is.
    """
    if not 1 <= s <= system.generator_count:
        raise ValueError(f"generator index must be in 1..{system.generator_count}")
    total = sum(system.basis.integer_rows[s - 1])
    if total != 0:
        raise AssertionError("hyperplane basis row does not sum to zero")
    return Fraction(0)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def _is_box_system(system: HaarSystem) -> bool:
    try:
        monomial_structure(system.matrix)
        return True
    except NotMonomialError:
        return False


def exact_inner(system: HaarSystem, i: int, j: int) -> Fraction:
    """Exact inner product for box tiles; indices 0 = scaling, s = psi_s.

    All pieces M^{-1}(G + d_k) have volume mu(G)/m = 1/m and overlap in
    measure zero, so products reduce to integer dot products of the
    Helmert rows:  <psi_s, psi_t> = u_s . u_t / sqrt(nsq_s * nsq_t), which
    is 0 for s != t and 1 for s = t; <psi_s, scaling> = 0 by zero sum.
    """
    mcount = system.m
    if not 0 <= i < mcount or not 0 <= j < mcount:
        raise ValueError("function index out of range")
    if i == 0 and j == 0:
        return Fraction(1)
    if i == 0 or j == 0:
        s = max(i, j)
        if sum(system.basis.integer_rows[s - 1]) != 0:
            raise AssertionError("hyperplane basis row does not sum to zero")
        return Fraction(0)
    us = system.basis.integer_rows[i - 1]
    ut = system.basis.integer_rows[j - 1]
    dot = sum(a * b for a, b in zip(us, ut))
    if i == j:
        # dot equals nsq_s, so the normalized product is exactly one
        return Fraction(dot, system.basis.norm_sq[i - 1])
    if dot != 0:
        raise AssertionError("Helmert rows are not orthogonal")
    return Fraction(0)


def exact_gram(system: HaarSystem):
    """Exact Gram matrix of the generators (box tiles), as Fractions."""
    n = system.generator_count
    return tuple(
        tuple(exact_inner(system, s + 1, t + 1) for t in range(n)) for s in range(n)
    )


class _PieceClassifier:
    """Classifies raster sample points into refinement pieces of the tile.

    The depth-(K+1) expansion cells partition a measure-one stand-in for
    the tile into disjoint floor-cells: x is claimed iff
    floor(M^(K+1) x) is an expansion cell, and its piece is the first
    expansion digit, recovered as the unique d with cell - M^K d among the
    depth-K cells.  Exact integer arithmetic; no membership ambiguity.
    """

    def __init__(self, system: HaarSystem, depth: int):
        self.system = system
        self.depth = depth
        fine = approximate(system.matrix, system.digits, depth + 1)
        coarse = approximate(system.matrix, system.digits, depth)
        self.fine = set(fine.cells)
        self.coarse = set(coarse.cells)
        self.mk1 = mat_pow(system.matrix, depth + 1)
        mk = mat_pow(system.matrix, depth)
        self.offsets = [mat_vec(mk, d) for d in system.digits]
        self.dim = len(system.matrix)

    def piece_of(self, num, den):
        """Piece index for the point num/den, or -1 when outside the stand-in."""
        base = mat_vec(self.mk1, num)
        cell = tuple(base[i] // den for i in range(self.dim))
        if cell not in self.fine:
            return -1
        for k, off in enumerate(self.offsets):
            if tuple(cell[i] - off[i] for i in range(self.dim)) in self.coarse:
                return k
        raise AssertionError("expansion cell lost its leading digit")


_CLASSIFIER_CACHE: dict = {}


def _classifier_for(system: HaarSystem, depth: int) -> _PieceClassifier:
    key = (system.matrix, system.digits, depth)
    if key not in _CLASSIFIER_CACHE:
        if len(_CLASSIFIER_CACHE) >= 16:
            _CLASSIFIER_CACHE.pop(next(iter(_CLASSIFIER_CACHE)))
        _CLASSIFIER_CACHE[key] = _PieceClassifier(system, depth)
    return _CLASSIFIER_CACHE[key]


def evaluate(system: HaarSystem, s: int, x, depth: int = 12) -> float:
    """Value of generator s (1-based) at the point x; 0 outside the tile.

    Membership is resolved at the given depth against the expansion cells,
    so values within O(||M||^-depth) of a piece boundary may land on either
    side.  Exact rational points are handled exactly.
    """
    if not 1 <= s <= system.generator_count:
        raise ValueError(f"generator index must be in 1..{system.generator_count}")
    fr = [Fraction(v) for v in x]
    if len(fr) != len(system.matrix):
        raise ValueError("point has wrong dimension")
    den = 1
    for f in fr:
        den = den * f.denominator // math.gcd(den, f.denominator)
    num = tuple(int(f * den) for f in fr)
    piece = _classifier_for(system, depth).piece_of(num, den)
    if piece < 0:
        return 0.0
    return system.pieces[s - 1][piece][1]


def _sample_pieces(system: HaarSystem, resolution: int, depth: int):
    """Piece index of every raster cell center over the bounding-box grid.

    Returns (piece array, cell volume).  Centers are exact rationals
    x_i = lo_i + (2 j + 1) / (2 R), so the classification is deterministic.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    lo, hi = bounding_box(system.matrix, system.digits)
    d = len(system.matrix)
    counts = [max(1, -int(-((hi[i] - lo[i]) * resolution) // 1)) for i in range(d)]
    cls = _PieceClassifier(system, depth)
    lo_fr = [Fraction(x) for x in lo]
    den = 2 * resolution
    pieces = np.full(counts, -1, dtype=np.int32)
    for idx in product(*[range(c) for c in counts]):
        num = tuple(int((lo_fr[i] + Fraction(2 * idx[i] + 1, den)) * den)
                    for i in range(d))
        pieces[idx] = cls.piece_of(num, den)
    return pieces, float(resolution) ** (-d)


def _edge_fraction(pieces: np.ndarray) -> float:
    """Fraction of claimed samples adjacent to a differently-claimed sample."""
    claimed = pieces >= 0
    if not claimed.any():
        return 0.0
    edge = np.zeros_like(claimed)
    for axis in range(pieces.ndim):
        a = np.swapaxes(pieces, 0, axis)
        e = np.swapaxes(edge, 0, axis)
        e[:-1] |= a[:-1] != a[1:]
        e[1:] |= a[1:] != a[:-1]
    return float(np.count_nonzero(edge & claimed)) / float(np.count_nonzero(claimed))


def raster_gram(system: HaarSystem, resolution: int = 64, depth: int = 12):
    """Gram matrix of the generators by raster quadrature.

    Samples cell centers of the certified bounding-box grid, classifies
    each into a refinement piece, and accumulates coefficient products
    times cell volume.  Returns (gram ndarray, edge_fraction); the edge
    fraction (samples on piece boundaries) is the resolution-limited part
    of the quadrature error.
    """
    pieces, cell_vol = _sample_pieces(system, resolution, depth)
    n = system.generator_count
    coeff = np.array([[c for _, c in row] for row in system.pieces])
    gram = np.zeros((n, n))
    flat = pieces.ravel()
    for k in range(system.m):
        count = int(np.count_nonzero(flat == k))
        if count:
            vals = coeff[:, k]
            gram += count * np.outer(vals, vals)
    gram *= cell_vol
    return gram, _edge_fraction(pieces)


def inner_product(system: HaarSystem, i: int, j: int, method: str = "auto",
                  resolution: int = 64, depth: int = 12):
    """Inner product of two system functions (0 = scaling, s = generator s).

    Box tiles take the exact rational route; other tiles use raster
    quadrature at the given resolution and membership depth.
    """
    if method == "auto":
        method = "exact" if _is_box_system(system) else "raster"
    if method == "exact":
        return exact_inner(system, i, j)
    if method != "raster":
        raise ValueError(f"unknown method {method!r}")
    if i == 0 or j == 0:
        return _raster_inner_scaling(system, i, j, resolution, depth)
    gram, _ = raster_gram(system, resolution, depth)
    return float(gram[i - 1][j - 1])


def _raster_inner_scaling(system, i, j, resolution, depth):
    pieces, cell_vol = _sample_pieces(system, resolution, depth)
    coeff = np.array([[c for _, c in row] for row in system.pieces])
    total = 0.0
    flat = pieces.ravel()
    for k in range(system.m):
        count = int(np.count_nonzero(flat == k))
        if not count:
            continue
        v_i = 1.0 if i == 0 else coeff[i - 1][k]
        v_j = 1.0 if j == 0 else coeff[j - 1][k]
        total += count * v_i * v_j
    return total * cell_vol


def shift_orthonormality(matrix, digits, window: int = 1, depth: int = 12) -> float:
    """Max deviation of <chi_G, chi_G(. + k)> from delta_k over a lattice window.

    For a certified tile the expansion cells are a measure-exact stand-in
    for G, and overlaps are counted as |cells intersect (cells + M^depth k)|
    / m^depth: exactly one at k = 0, decreasing toward zero with depth for
    k != 0.  Systems covering in several layers fall back to the unit-cell
    cover, whose overlap counts stay bounded away from zero.
    """
    m = as_int_matrix(matrix)
    d = len(m)
    digits_t = tuple(tuple(int(x) for x in v) for v in digits)
    if _tile_report_cached(m, digits_t).is_tile:
        cellset = set(approximate(m, digits_t, depth).cells)
    else:
        cellset = touched_cells(m, digits_t, depth)
    modulus = abs(lattice.det(m)) ** depth
    mk = mat_pow(m, depth)
    worst = 0.0
    for k in product(*[range(-window, window + 1) for _ in range(d)]):
        off = mat_vec(mk, k)
        count = 0
        for c in cellset:
            if tuple(c[i] + off[i] for i in range(d)) in cellset:
                count += 1
        value = count / modulus
        target = 1.0 if all(x == 0 for x in k) else 0.0
        worst = max(worst, abs(value - target))
    return worst
