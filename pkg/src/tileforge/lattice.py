"""Exact integer linear algebra for dilation matrices and digit sets.

A dilation system is a square integer matrix M (all eigenvalues strictly
outside the unit circle) together with a set of integer "digits", one
representative per class of Z^d / M Z^d, always containing the zero vector.
Everything in this module that feeds a yes/no decision is computed exactly
over the integers or rationals; floating point only enters the eigenvalue
test, guarded by a conservative tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

#: A matrix with an eigenvalue within EIG_TOL of the unit circle is rejected
#: as non-expanding.
EIG_TOL = 1e-9

#: Entries beyond this magnitude are refused (documented 64-bit input bound).
MAX_ENTRY = 2**63 - 1


class SingularMatrixError(ValueError):
    """Matrix has determinant zero where an invertible one is required."""


def as_int_matrix(entries):
    """Validate and freeze a square integer matrix as a tuple of tuples.

    Accepts any nested sequence (lists, tuples, numpy arrays).  Rejects
    non-square shapes, non-integer entries and entries outside the 64-bit
    range.
    """
    rows = [tuple(row) for row in entries]
    d = len(rows)
    if d == 0:
        raise ValueError("matrix must have at least one row")
    for row in rows:
        if len(row) != d:
            raise ValueError("matrix must be square")
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise ValueError(f"matrix entries must be integers, got {x!r}")
            if abs(int(x)) > MAX_ENTRY:
                raise OverflowError(f"matrix entry {x} exceeds 64-bit input bound")
    return tuple(tuple(int(x) for x in row) for row in rows)


def as_int_vector(v, dim=None):
    """Freeze an integer vector as a tuple, optionally checking its length."""
    vec = tuple(int(x) for x in v)
    for x, raw in zip(vec, v):
        if isinstance(raw, float) and raw != x:
            raise ValueError(f"vector entry {raw!r} is not an integer")
    if dim is not None and len(vec) != dim:
        raise ValueError(f"expected a vector of length {dim}, got {len(vec)}")
    return vec


def dim_of(matrix) -> int:
    return len(matrix)


def det(matrix) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    m = [list(row) for row in as_int_matrix(matrix)]
    n = len(m)
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
                # Bareiss: exact division, stays integral.
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_vec(matrix, v):
    """Integer matrix times integer vector."""
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in matrix)


def mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def mat_pow(matrix, k: int):
    """Integer matrix power, k >= 0."""
    n = len(matrix)
    result = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    base = as_int_matrix(matrix)
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base) if k > 1 else base
        k >>= 1
    return result


def inverse_fractions(matrix):
    """Exact inverse as a matrix of Fractions (Gauss-Jordan over Q)."""
    m = as_int_matrix(matrix)
    n = len(m)
    a = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def frac_mat_vec(matrix, v):
    """Fraction matrix times vector (entries may be int or Fraction)."""
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in matrix)


def frac_mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def inf_norm(matrix) -> Fraction:
    """Max absolute row sum; exact when entries are Fractions."""
    return max(sum(abs(x) for x in row) for row in matrix)


def is_expanding(matrix, eig_tol: float = EIG_TOL) -> bool:
    """True iff every eigenvalue of M has modulus > 1 + eig_tol.

    An integer matrix with all |lambda| > 1 has |det| = prod |lambda| > 1,
    hence |det| >= 2; that necessary condition is checked exactly first, so
    floating point can only make the test more conservative, never accept a
    non-expanding matrix with unit determinant.
    """
    m = as_int_matrix(matrix)
    if abs(det(m)) < 2:
        return False
    eigvals = np.linalg.eigvals(np.array(m, dtype=float))
    return bool(np.min(np.abs(eigvals)) > 1.0 + eig_tol)


def residue_of(matrix, v):
    """Canonical representative of v modulo M Z^d.

    The representative is the unique r with v = M z + r (z integral) and
    M^{-1} r in the half-open cube [0,1)^d, i.e. r lies in the half-open
    fundamental parallelepiped M [0,1)^d.  Computed exactly: z_i =
    floor((M^{-1} v)_i).
    """
    m = as_int_matrix(matrix)
    if det(m) == 0:
        raise SingularMatrixError("residues are undefined for a singular matrix")
    v = as_int_vector(v, dim=len(m))
    minv = inverse_fractions(m)
    y = frac_mat_vec(minv, v)
    z = tuple(int(c // 1) for c in y)  # Fraction floor, exact
    return tuple(v[i] - x for i, x in enumerate(mat_vec(m, z)))


def residue_system(matrix):
    """All |det M| lattice points inside M [0,1)^d, in lexicographic order.

    These are pairwise inequivalent modulo M Z^d, include the zero vector,
    and form the canonical digit set of M.
    """
    m = as_int_matrix(matrix)
    d = len(m)
    if det(m) == 0:
        raise SingularMatrixError("no residue system for a singular matrix")
    minv = inverse_fractions(m)
    # Bounding box of the parallelepiped M [0,1)^d from its corners.
    corners = [mat_vec(m, c) for c in product((0, 1), repeat=d)]
    lo = [min(c[i] for c in corners) for i in range(d)]
    hi = [max(c[i] for c in corners) for i in range(d)]
    digits = []
    for r in product(*(range(lo[i], hi[i] + 1) for i in range(d))):
        y = frac_mat_vec(minv, r)
        if all(0 <= c < 1 for c in y):
            digits.append(r)
    digits.sort()
    assert len(digits) == abs(det(m))
    return tuple(digits)


def validate_digits(matrix, digits) -> bool:
    """True iff digits are a full residue system for M containing zero.

    Checks cardinality |D| = |det M|, membership of the zero vector, and
    pairwise inequivalence modulo M Z^d.
    """
    m = as_int_matrix(matrix)
    d = len(m)
    if det(m) == 0:
        return False
    try:
        ds = [as_int_vector(v, dim=d) for v in digits]
    except ValueError:
        return False
    if len(ds) != abs(det(m)):
        return False
    if tuple([0] * d) not in ds:
        return False
    residues = {residue_of(m, v) for v in ds}
    return len(residues) == len(ds)
