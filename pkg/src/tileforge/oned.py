"""One-dimensional integer tiles: direct sums, tiling oracle, classification.

A finite set Y of nonnegative integers containing 0 "tiles" when some set of
shifts L places non-overlapping translates of Y onto a full integer segment
{0..N-1}.  Such sets are exactly the direct sums of arithmetic progressions
{0, a, ..., a(d-1)} whose steps follow the chain a_1 = 1, a_k = d_1...d_{k-1}
(with an arbitrary subset of the progressions chosen); this module implements
the constructive side of that classification plus the search oracle, the
block-structure test for shift sets, and the polynomial identities behind it.

Sets are encoded as bitmasks internally; the polynomial of a set A is
sum_{a in A} z^a, and direct-sum validity is equivalent to the product
polynomial having all coefficients in {0, 1}.
"""

from __future__ import annotations

from typing import NamedTuple


class CollisionError(ValueError):
    """A sumset collision: two pairs produce the same sum."""

    def __init__(self, value, pair_a, pair_b):
        self.value = value
        self.pair_a = pair_a
        self.pair_b = pair_b
        super().__init__(
            f"direct sum collision at {value}: {pair_a[0]}+{pair_a[1]} = "
            f"{pair_b[0]}+{pair_b[1]}"
        )


class NotTilingError(ValueError):
    """No tiling of an integer segment was found within the search bound."""

    def __init__(self, n_max):
        self.n_max = n_max
        super().__init__(f"no segment tiling found up to length {n_max} "
                         "(bounded verdict, not a proof beyond the bound)")


class NotSimpleError(ValueError):
    """The set is not a direct sum of chain-compatible progressions."""


class Progression(NamedTuple):
    """The arithmetic progression {0, a, 2a, ..., a(d-1)}."""

    a: int
    d: int

    def elements(self):
        return tuple(self.a * i for i in range(self.d))


def as_intset(elements):
    """Validate and freeze a 0-based strictly increasing integer set."""
    xs = sorted({int(x) for x in elements})
    if not xs:
        raise ValueError("set must be nonempty")
    if xs[0] != 0:
        raise ValueError("set must contain 0 as its first element")
    if any(x < 0 for x in xs):
        raise ValueError("set elements must be nonnegative")
    return tuple(xs)


def _mask(xs) -> int:
    m = 0
    for x in xs:
        m |= 1 << x
    return m


def _unmask(m: int):
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def poly_of_set(elements):
    """Dense integer coefficient tuple of sum z^a over the set."""
    xs = as_intset(elements)
    coeffs = [0] * (xs[-1] + 1)
    for x in xs:
        coeffs[x] = 1
    return tuple(coeffs)


def poly_mul(p, q):
    """Exact product of dense integer coefficient tuples."""
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return tuple(out)


def poly_eq(p, q) -> bool:
    """Equality up to trailing zeros."""
    def trim(c):
        c = list(c)
        while c and c[-1] == 0:
            c.pop()
        return tuple(c)
    return trim(p) == trim(q)


def segment_poly(d: int, step: int = 1):
    """P_d(z^step) = 1 + z^step + ... + z^(step*(d-1))."""
    if d < 1 or step < 1:
        raise ValueError("need d >= 1 and step >= 1")
    coeffs = [0] * (step * (d - 1) + 1)
    for i in range(d):
        coeffs[step * i] = 1
    return tuple(coeffs)


# ---------------------------------------------------------------------------
# direct sums and cancellation
# ---------------------------------------------------------------------------

def direct_sum(a, b):
    """Sumset {x + y}, valid only when all |A||B| sums are distinct.

    Raises CollisionError naming one colliding pair of representations.
    """
    xs = as_intset(a)
    ys = as_intset(b)
    seen = {}
    acc = 0
    for y in ys:
        for x in xs:
            v = x + y
            if acc >> v & 1:
                raise CollisionError(v, seen[v], (x, y))
            acc |= 1 << v
            seen[v] = (x, y)
    return _unmask(acc)


def cancel(a, ab_sum):
    """The unique B with A (+) B = ab_sum, by minimal-element peeling.

    Repeatedly: the least remaining sum must be a_min + b for the next
    smallest b; strip the translate A + b and continue.  Raises ValueError
    when no such B exists.
    """
    xs = as_intset(a)
    target = as_intset(ab_sum)
    remaining = _mask(target)
    amask = _mask(xs)
    out = []
    while remaining:
        b = (remaining & -remaining).bit_length() - 1  # least remaining sum, = 0 + b
        placed = amask << b
        if placed & remaining != placed:
            raise ValueError(f"no left-cancellation: translate at {b} does not fit")
        remaining ^= placed
        out.append(b)
    result = tuple(out)
    # Confirm the reconstruction is a genuine direct sum.
    if direct_sum(xs, result) != target:
        raise ValueError("cancellation failed to reproduce the sum")
    return result


# ---------------------------------------------------------------------------
# the tiling oracle
# ---------------------------------------------------------------------------

def default_search_bound(y) -> int:
    """Default segment-length cap: |Y| * 2^(max(Y) - |Y| + 1), capped at 1e6."""
    ys = as_intset(y)
    exp = max(ys[-1] - len(ys) + 1, 0)
    return min(len(ys) << exp, 10**6)


def tiling_oracle(y, n_max: int | None = None):
    """Tile an integer segment {0..N-1} with translates of Y, if possible.

    The translate covering the leftmost hole is forced (Y starts at 0 and
    everything left of the hole is already covered), so the search is a
    deterministic left-to-right sweep: place, check overlap, stop at the
    first complete segment.  Returns (N, L) with the lexicographically
    first shift set; raises NotTilingError when the bound n_max is hit
    (a bounded verdict, since any tiling must contain the forced prefix).
    """
    ys = as_intset(y)
    if n_max is None:
        n_max = default_search_bound(ys)
    if n_max < ys[-1] + 1:
        raise ValueError("n_max must be at least max(Y) + 1")
    ymask = _mask(ys)
    covered = ymask
    shifts = [0]
    while True:
        n = covered.bit_length()
        if covered == (1 << n) - 1:
            return n, tuple(shifts)
        hole = _lowest_zero(covered)
        if hole + ys[-1] + 1 > n_max:
            raise NotTilingError(n_max)
        placed = ymask << hole
        if placed & covered:
            raise NotTilingError(n_max)
        covered |= placed
        shifts.append(hole)


def _lowest_zero(mask: int) -> int:
    """Index of the lowest zero bit of mask."""
    return ((~mask) & (mask + 1)).bit_length() - 1


def is_l_set(elements, l: int) -> bool:
    """True iff the set is a union of full blocks {j*l, ..., j*l + l - 1}."""
    if l <= 0:
        raise ValueError("block length must be positive")
    xs = sorted({int(x) for x in elements})
    blocks = {x // l for x in xs}
    return len(xs) == l * len(blocks) and all(
        (b * l + r) in set(xs) for b in blocks for r in range(l)
    )


# ---------------------------------------------------------------------------
# classification into progressions
# ---------------------------------------------------------------------------

def classify(y):
    """Canonical decomposition of Y into a direct sum of progressions.

    Greedy peel: take a = least nonzero element, d = length of the maximal
    run 0, a, 2a, ... present in Y, strip {0..a(d-1)} by cancellation, and
    recurse; finally check the chain condition a_k * d_k | a_{k+1} which
    characterizes the sets tiling an integer segment.  Returns progressions
    with strictly increasing steps; raises NotSimpleError otherwise.

    The decomposition of a tiling set is not unique ({0,1,2,3} is also
    {0,1} (+) {0,2}); the maximal-run peel makes the result canonical and
    idempotent under re-classification.
    """
    ys = as_intset(y)
    progressions = []
    current = ys
    while current != (0,):
        a = current[1]
        d = 1
        members = set(current)
        while a * d in members:
            d += 1
        try:
            rest = cancel(Progression(a, d).elements(), current)
        except ValueError as exc:
            raise NotSimpleError(
                f"peeling stalled at step {a}, run {d}: {exc}") from exc
        progressions.append(Progression(a, d))
        current = rest if rest[0] == 0 else (0,) + rest
        current = as_intset(current)
    for prev, nxt in zip(progressions, progressions[1:]):
        if nxt.a % (prev.a * prev.d) != 0:
            raise NotSimpleError(
                f"chain condition fails: {prev.a}*{prev.d} does not divide {nxt.a}")
    return progressions


def progression_family(d_list):
    """The full chain family for factor list (d_1, ..., d_n).

    Progressions (a_k, d_k) with a_k = d_1 ... d_{k-1}; their total direct
    sum is the segment {0 .. prod(d_i) - 1}.
    """
    ds = [int(d) for d in d_list]
    if any(d < 2 for d in ds):
        raise ValueError("every factor must be >= 2")
    out = []
    a = 1
    for d in ds:
        out.append(Progression(a, d))
        a *= d
    return out


def _ordered_factorizations(n: int):
    """All ordered tuples of factors >= 2 with the given product."""
    if n == 1:
        yield ()
        return
    for f in range(2, n + 1):
        if n % f == 0:
            for rest in _ordered_factorizations(n // f):
                yield (f,) + rest


def enumerate_simple(n: int):
    """All segment-tiling subsets of {0..n-1} containing 0, sorted.

    Direct sums of subsets of progression_family(f) over every ordered
    factorization f of n; includes the trivial {0} and the full segment.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    found = {(0,)}
    for factors in _ordered_factorizations(n):
        family = progression_family(factors)
        for pick in range(1, 1 << len(family)):
            subset = [family[i] for i in range(len(family)) if pick >> i & 1]
            acc = (0,)
            for prog in subset:
                acc = direct_sum(acc, prog.elements())
            found.add(tuple(acc))
    return sorted(found)


# ---------------------------------------------------------------------------
# segment sets
# ---------------------------------------------------------------------------

def segments_to_intset(segments):
    """Map a union of equal-length integer segments to its integer set.

    Segments are (start, length) pairs, sorted, with disjoint interiors
    (touching endpoints allowed).  All lengths must be equal and every
    start divisible by the common length; after rescaling by that length
    the set of starts is the integer set.  Unequal lengths are rejected:
    such a union can never tile a segment by translates.
    """
    segs = [(int(s), int(ln)) for s, ln in segments]
    if not segs:
        raise ValueError("segment set must be nonempty")
    if any(ln <= 0 for _, ln in segs):
        raise ValueError("segment lengths must be positive")
    segs.sort()
    for (s1, l1), (s2, _) in zip(segs, segs[1:]):
        if s1 + l1 > s2:
            raise ValueError("segments must have disjoint interiors")
    lengths = {ln for _, ln in segs}
    if len(lengths) != 1:
        raise ValueError(f"segments must all have the same length, got {sorted(lengths)}")
    h = lengths.pop()
    if any(s % h for s, _ in segs):
        raise ValueError("segment starts must be multiples of the common length")
    return as_intset(s // h for s, _ in segs)


def intset_to_segments(y):
    """Inverse map: the unit-segment decomposition [(y, 1) for y in Y]."""
    return tuple((x, 1) for x in as_intset(y))
