"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  Tolerances and runtime caps are asserted exactly as stated;
nothing is deferred to calibration.
"""

import itertools
import json
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from tileforge import lattice, oned
from tileforge.attractor import (
    approximate,
    bounding_box,
    measure_upper,
    rasterize,
    shift_cover_layers,
    tile_check_exact,
)
from tileforge.boxtile import (
    BoxForm,
    box_digits,
    build_cyclic_matrix,
    is_parallelepiped,
    suggested_depth,
    tensor_product,
)
from tileforge.cli import main as cli_main
from tileforge.haar import build_wavelets, exact_gram, raster_gram, wavelet_mean

DRAGON_M = ((1, 1), (-1, 1))
DRAGON_D = ((0, 0), (1, 0))
RECT_M = ((0, -2), (1, 0))
RECT_D = ((0, 0), (1, 0))
LINE_SET = (0, 3, 6, 18, 21, 24)


def _report(n, text):
    print(f"ACCEPTANCE {n} PASS: {text}")


def all_box_forms(max_n=4, max_prod=16):
    for n in range(1, max_n + 1):
        for p in itertools.product(range(1, max_prod + 1), repeat=n):
            prod = 1
            for x in p:
                prod *= x
            if 2 <= prod <= max_prod:
                for sign in (1, -1):
                    yield BoxForm(p, sign)




def test_criterion_1_dragon_tile():
    """Dragon: tile certified, measure bound in [1.0, 1.10] at K=14, < 10 s."""
    start = time.perf_counter()
    report = tile_check_exact(DRAGON_M, DRAGON_D)
    assert report.is_tile and not report.indeterminate
    mu = float(measure_upper(DRAGON_M, DRAGON_D, 14))
    assert 1.0 <= mu <= 1.10
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _report(1, f"dragon is_tile=True, measure_upper(K=14)={mu:.6f}, "
               f"{elapsed:.2f}s < 10s")


def test_criterion_2_rectangle_and_dragon_shape():
    """Rectangle: tile and box at (tol 0.05, K=8); dragon: not a box."""
    rect_tile = tile_check_exact(RECT_M, RECT_D)
    assert rect_tile.is_tile
    rect_box = is_parallelepiped(approximate(RECT_M, RECT_D, 8), tol=0.05)
    assert rect_box.is_box
    dragon_box = is_parallelepiped(approximate(DRAGON_M, DRAGON_D, 8), tol=0.05)
    assert not dragon_box.is_box
    _report(2, f"rect is_tile+is_box (hull={rect_box.hull_volume:.4f}), "
               f"dragon is_box=False (hull={dragon_box.hull_volume:.3f} vs "
               f"fit={dragon_box.fit_volume:.3f})")


def test_criterion_3_box_round_trip():
    """Every cyclic form with n <= 4, prod p <= 16 builds a verified box tile."""
    start = time.perf_counter()
    forms = list(all_box_forms())
    two = BoxForm((1, 1, 2), 1)
    twelve = BoxForm((3, 2, 2), 1)
    assert two in forms and twelve in forms
    assert len(box_digits(two)) == 2
    assert len(box_digits(twelve)) == 12
    for form in forms:
        matrix = build_cyclic_matrix(form)
        digits = box_digits(form)
        assert lattice.validate_digits(matrix, digits), form
        assert tile_check_exact(matrix, digits).is_tile, form
        depth = suggested_depth(matrix, digits)
        assert is_parallelepiped(approximate(matrix, digits, depth)).is_box, form
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _report(3, f"{len(forms)} cyclic forms (n<=4, prod<=16, both signs) all "
               f"validate+tile+box in {elapsed:.1f}s < 60s")


def test_criterion_4_non_tile_detection():
    """(M=2, D={0,3}): not a tile, Perron radius = 2 within 1e-6, 3 layers."""
    report = tile_check_exact([[2]], [(0,), (3,)])
    assert not report.is_tile and not report.indeterminate
    assert abs(report.spectral_radius - 2.0) <= 1e-6
    hist = shift_cover_layers(approximate([[2]], [(0,), (3,)], 10))
    dominant = max(hist, key=hist.get)
    assert dominant == 3
    _report(4, f"{{0,3}} is_tile=False, rho={report.spectral_radius:.9f}, "
               f"dominant layer count {dominant}")


def test_criterion_5_line_example():
    """Tiling oracle, l-set structure and classification of the paper line set."""
    start = time.perf_counter()
    n, shifts = oned.tiling_oracle(LINE_SET)
    assert (n, shifts) == (36, (0, 1, 2, 9, 10, 11))
    assert oned.is_l_set(shifts, 3)
    assert oned.classify(LINE_SET) == [oned.Progression(3, 3), oned.Progression(18, 2)]
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(5, f"{{0,3,6,18,21,24}} tiles N=36 with L={list(shifts)}, 3-set, "
               f"classified [(3,3),(18,2)] in {elapsed:.3f}s < 1s")


def test_criterion_6_enumeration_completeness():
    """enumerate_simple(N) equals the exact-cover brute force for N <= 18."""
    start = time.perf_counter()
    total = 0
    for n in range(1, 19):
        brute = []
        for extra in range(1 << (n - 1)):
            ymask = (extra << 1) | 1
            if n % bin(ymask).count("1"):
                continue
            covered = ymask
            ok = True
            while covered != (1 << n) - 1:
                hole = ((~covered) & (covered + 1)).bit_length() - 1
                placed = ymask << hole
                if placed & covered or placed >> n:
                    ok = False
                    break
                covered |= placed
            if ok:
                brute.append(tuple(i for i in range(n) if ymask >> i & 1))
        brute.sort()
        assert oned.enumerate_simple(n) == brute, n
        total += len(brute)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    _report(6, f"enumeration matches brute force for N=1..18 "
               f"({total} tilers) in {elapsed:.1f}s < 120s")


def test_criterion_7_polynomial_identity():
    """Chain product of segment polynomials equals P_N for all N <= 64."""
    def tuples(n):
        if n == 1:
            yield ()
            return
        for f in range(2, n + 1):
            if n % f == 0:
                for rest in tuples(n // f):
                    yield (f,) + rest

    count = 0
    for n in range(2, 65):
        for ds in tuples(n):
            acc = (1,)
            for prog in oned.progression_family(ds):
                acc = oned.poly_mul(acc, oned.segment_poly(prog.d, prog.a))
            assert oned.poly_eq(acc, oned.segment_poly(n)), (n, ds)
            count += 1
    _report(7, f"segment polynomial identity exact for {count} factor tuples, N<=64")


def test_criterion_8_haar_orthonormality():
    """Exact Gram identity for box systems; dragon raster Gram within 0.05."""
    classic = build_wavelets([[2]], [(0,), (1,)])
    g = exact_gram(classic)
    assert g == ((Fraction(1),),)
    form = BoxForm((3, 2, 2), 1)
    box_sys = build_wavelets(build_cyclic_matrix(form), box_digits(form))
    gb = exact_gram(box_sys)
    n = box_sys.generator_count
    assert all(gb[s][t] == (1 if s == t else 0) for s in range(n) for t in range(n))
    dragon_sys = build_wavelets(DRAGON_M, DRAGON_D)
    gram, _ = raster_gram(dragon_sys, resolution=128, depth=16)
    dev = float(np.max(np.abs(gram - np.eye(dragon_sys.generator_count))))
    assert dev < 0.05
    for system in (classic, box_sys, dragon_sys):
        for s in range(1, system.generator_count + 1):
            assert wavelet_mean(system, s) == 0
    _report(8, f"exact Gram identity (m=2 and 12-digit box), dragon raster "
               f"Gram deviation {dev:.4f} < 0.05, zero means exact")


def test_criterion_9_tensor_products(tmp_path, capsys):
    """Product rasters are cartesian products; tile products are tiles; figures."""
    factors = [
        (((2,),), ((0,), (1,))),
        (((3,),), ((0,), (1,), (2,))),
        (((2,),), ((0,), (3,))),
    ]
    for (m1, s1), (m2, s2) in itertools.product(factors, repeat=2):
        mp, sp = tensor_product(m1, s1, m2, s2)
        b1, b2 = bounding_box(m1, s1), bounding_box(m2, s2)
        bp = (b1[0] + b2[0], b1[1] + b2[1])
        r1 = rasterize(approximate(m1, s1, 6), 16, box=b1)
        r2 = rasterize(approximate(m2, s2, 6), 16, box=b2)
        rp = rasterize(approximate(mp, sp, 6), 16, box=bp)
        cartesian = {c1 + c2 for c1 in r1.occupied() for c2 in r2.occupied()}
        assert set(rp.occupied()) == cartesian
    mp, sp = tensor_product([[2]], [(0,), (1,)], [[3]], [(0,), (1,), (2,)])
    assert tile_check_exact(mp, sp).is_tile

    # the planar disconnected attractor and its tiling, as images
    line_shifts = [[l + 36 * y] for l in (0, 1, 2, 9, 10, 11) for y in LINE_SET]
    mp, sp = tensor_product([[36]], line_shifts, [[36]], line_shifts)
    grid = rasterize(approximate(mp, sp, 1), 1, box=((0, 0), (25, 25)))
    assert set(grid.occupied()) == {(a, b) for a in LINE_SET for b in LINE_SET}
    spec = {"kind": "attractor", "matrix": [list(r) for r in mp],
            "shifts": [list(s) for s in sp]}
    spec_path = tmp_path / "twodim.json"
    spec_path.write_text(json.dumps(spec))
    img1 = tmp_path / "twodim2.ppm"
    code = cli_main(["tile", "render", "--spec", str(spec_path), "--depth", "1",
                     "--resolution", "4", "--out", str(img1)])
    assert code == 0 and img1.read_bytes().startswith(b"P6\n")
    img2 = tmp_path / "twodim_tiling.ppm"
    code = cli_main(["tile", "render", "--spec", str(spec_path), "--depth", "1",
                     "--resolution", "2", "--out", str(img2), "--tiling=0:2,0:2"])
    assert code == 0 and img2.read_bytes().startswith(b"P6\n")
    capsys.readouterr()
    _report(9, "product rasters cartesian-exact (m<=3, K=6), tile products "
               "are tiles, disconnected plane figures rendered")


def test_criterion_10_property_suites():
    """Monotone measures, residue invariance, cancellation, cross-agreement."""
    # measure_upper monotone in depth
    for m, d in [(((2,),), ((0,), (3,))), (DRAGON_M, DRAGON_D),
                 (((2,),), ((0,), (1,)))]:
        values = [measure_upper(m, d, k) for k in range(2, 9)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    # residue_of idempotence and translation invariance
    rng = random.Random(23)
    for matrix in [DRAGON_M, RECT_M, ((2, 0), (0, 2)), ((3,),)]:
        dim = len(matrix)
        for _ in range(60):
            v = tuple(rng.randint(-30, 30) for _ in range(dim))
            r = lattice.residue_of(matrix, v)
            assert lattice.residue_of(matrix, r) == r
            z = tuple(rng.randint(-4, 4) for _ in range(dim))
            mz = lattice.mat_vec(matrix, z)
            assert lattice.residue_of(
                matrix, tuple(v[i] + mz[i] for i in range(dim))) == r

    # cancel inverts direct_sum
    for _ in range(300):
        a = tuple([0] + sorted(rng.sample(range(1, 25), rng.randint(1, 3))))
        b = tuple([0] + sorted(rng.sample(range(1, 35), rng.randint(1, 3))))
        try:
            s = oned.direct_sum(a, b)
        except oned.CollisionError:
            continue
        assert oned.cancel(a, s) == b

    # classification agrees with the tiling oracle on every 0-containing
    # subset of {0..17}
    mismatches = 0
    for extra in range(1 << 17):
        y = tuple(i for i in range(18) if ((extra << 1) | 1) >> i & 1)
        try:
            oned.classify(y)
            simple = True
        except oned.NotSimpleError:
            simple = False
        try:
            oned.tiling_oracle(y)
            tiles = True
        except oned.NotTilingError:
            tiles = False
        if simple != tiles:
            mismatches += 1
    assert mismatches == 0
    _report(10, "measure monotone, residue invariants, cancel inverse, and "
                "classify/oracle agreement on all 131072 subsets of {0..17}")
