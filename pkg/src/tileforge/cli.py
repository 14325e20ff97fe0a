"""Command-line front end: tile checks, box tools, Haar reports, renders.

Commands
    tile check | measure | render
    box build | digits | detect
    haar build | gram
    oned oracle | classify | enumerate | lset
    product

All reports are deterministic JSON on stdout (sorted keys, two-space
indent); images are binary PPM (P6).  Exit codes: 0 success, 1 verified
negative (not a tile, not a box, no tiling, not simple, not an l-set),
2 invalid input, 3 resource cap hit.  The environment variable
TILEFORGE_MAX_CELLS caps the cell budget of attractor construction.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import attractor, boxtile, haar, lattice, oned

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3

#: Fixed render palette, cycled per translate in deterministic order.
PALETTE = (
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
    (148, 103, 189), (140, 86, 75), (227, 119, 194), (127, 127, 127),
    (188, 189, 34), (23, 190, 207), (174, 199, 232), (255, 187, 120),
)


class InputError(ValueError):
    """Bad command-line or problem-spec input (exit code 2)."""


def _emit(report) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2))
    sys.stdout.write("\n")


def _parse_json_field(text, name):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON for {name}: {exc}") from exc


def _parse_int_list(text, name):
    try:
        return [int(x) for x in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise InputError(f"{name} must be a comma-separated integer list") from exc


def _load_spec(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"spec file is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise InputError("problem spec must be a JSON object")
    return spec


_SPEC_FIELDS = {
    "attractor": {"matrix"},
    "boxform": {"p"},
    "oned": {"set"},
}
_SPEC_OPTIONAL = {
    "attractor": {"digits", "shifts", "params"},
    "boxform": {"sign", "params"},
    "oned": {"l", "params"},
}


def _validate_spec(spec):
    kind = spec.get("kind")
    if kind not in _SPEC_FIELDS:
        raise InputError(f"spec kind must be one of {sorted(_SPEC_FIELDS)}, got {kind!r}")
    required = _SPEC_FIELDS[kind]
    allowed = required | _SPEC_OPTIONAL[kind] | {"kind"}
    missing = required - spec.keys()
    if missing:
        raise InputError(f"spec kind {kind!r} requires fields {sorted(missing)}")
    extra = spec.keys() - allowed
    if extra:
        raise InputError(f"spec kind {kind!r} does not take fields {sorted(extra)}")
    return spec


def _matrix_digits_from(args, need_digits=True):
    """Matrix and digit/shift set from --spec plus inline flags (flags win)."""
    spec = {}
    if getattr(args, "spec", None):
        spec = _validate_spec(_load_spec(args.spec))
        if spec.get("kind") != "attractor":
            raise InputError("this command needs an attractor problem spec")
    matrix = spec.get("matrix")
    digits = spec.get("digits") or spec.get("shifts")
    if getattr(args, "matrix", None):
        matrix = _parse_json_field(args.matrix, "--matrix")
    if getattr(args, "digits", None):
        digits = _parse_json_field(args.digits, "--digits")
    if getattr(args, "shifts", None):
        digits = _parse_json_field(args.shifts, "--shifts")
    if matrix is None:
        raise InputError("a matrix is required (--matrix or --spec)")
    if need_digits and digits is None:
        raise InputError("a digit/shift set is required (--digits or --spec)")
    try:
        matrix = [[int(x) for x in row] for row in matrix]
        digits = [tuple(v) if hasattr(v, "__len__") else (v,) for v in digits]
        digits = [tuple(int(x) for x in v) for v in digits]
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix/digits must be integer arrays: {exc}") from exc
    params = spec.get("params", {}) if spec else {}
    return matrix, digits, params


def _boxform_from(args):
    spec = {}
    if getattr(args, "spec", None):
        spec = _validate_spec(_load_spec(args.spec))
        if spec.get("kind") != "boxform":
            raise InputError("this command needs a boxform problem spec")
    p = spec.get("p")
    sign = spec.get("sign", 1)
    if getattr(args, "p", None):
        p = _parse_int_list(args.p, "-p")
    if getattr(args, "sign", None):
        raw = args.sign
        if raw in ("+", "+1", "1"):
            sign = 1
        elif raw in ("-", "-1"):
            sign = -1
        else:
            raise InputError("--sign must be + or -")
    if p is None:
        raise InputError("box commands need -p (or a boxform spec)")
    try:
        return boxtile.BoxForm(tuple(p), int(sign))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# tile commands
# ---------------------------------------------------------------------------

def cmd_tile_check(args) -> int:
    matrix, digits, params = _matrix_digits_from(args)
    depth = args.depth or int(params.get("depth", 10))
    if not lattice.validate_digits(matrix, digits):
        raise InputError("digits are not a residue system for the matrix")
    report = attractor.tile_check_exact(matrix, digits)
    mu = attractor.measure_upper(matrix, digits, depth)
    approx = attractor.approximate(matrix, digits, depth)
    hist = attractor.shift_cover_layers(approx)
    _emit({
        "kind": "tile_check",
        "matrix": matrix,
        "digits": [list(v) for v in digits],
        "modulus": report.modulus,
        "is_tile": report.is_tile,
        "indeterminate": report.indeterminate,
        "spectral_radius": report.spectral_radius,
        "contact_states": len(report.contact),
        "depth": depth,
        "measure_upper": str(mu),
        "measure_upper_float": float(mu),
        "layers_histogram": {str(k): v for k, v in sorted(hist.items())},
    })
    if report.is_tile:
        return EXIT_OK
    return EXIT_NEGATIVE if not report.indeterminate else EXIT_OK


def cmd_tile_measure(args) -> int:
    matrix, digits, params = _matrix_digits_from(args)
    depth = args.depth or int(params.get("depth", 10))
    mu = attractor.measure_upper(matrix, digits, depth)
    _emit({
        "kind": "tile_measure",
        "matrix": matrix,
        "digits": [list(v) for v in digits],
        "depth": depth,
        "measure_upper": str(mu),
        "measure_upper_float": float(mu),
    })
    return EXIT_OK


def _parse_window(text):
    try:
        parts = [p.split(":") for p in text.split(",")]
        return tuple((int(a), int(b)) for a, b in parts)
    except (ValueError, TypeError) as exc:
        raise InputError("--tiling window must look like x0:x1,y0:y1") from exc


def write_ppm(path, pixels: np.ndarray) -> None:
    """Write an (h, w, 3) uint8 array as binary PPM (P6)."""
    h, w = pixels.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels.astype(np.uint8).tobytes())


def _raster_indices(approx, resolution):
    """Occupied global raster cells floor(x * resolution), exact arithmetic."""
    d = approx.dim
    cells = []
    if approx.is_integer:
        minv = lattice.inverse_fractions(approx.matrix)
        a = attractor._frac_power(minv, approx.depth)
        for z in approx.cells:
            x = lattice.frac_mat_vec(a, z)
            cells.append(tuple(int((x[i] * resolution) // 1) for i in range(d)))
    else:
        a = np.linalg.matrix_power(
            np.linalg.inv(np.array(approx.matrix, float)), approx.depth)
        for z in approx.cells:
            x = a @ np.array(z, float)
            cells.append(tuple(int(v) for v in np.floor(x * resolution)))
    return set(cells)


def cmd_tile_render(args) -> int:
    matrix, shifts, params = _matrix_digits_from(args)
    depth = args.depth or int(params.get("depth", 12))
    resolution = args.resolution or int(params.get("resolution", 64))
    if len(matrix) != 2:
        raise InputError("render supports two-dimensional systems")
    approx = attractor.approximate(matrix, shifts, depth)
    base = _raster_indices(approx, resolution)
    if args.tiling:
        window = _parse_window(args.tiling)
        if len(window) != 2:
            raise InputError("--tiling window must be two-dimensional")
        (x0, x1), (y0, y1) = window
        if x1 <= x0 or y1 <= y0:
            raise InputError("--tiling window is empty")
        width = (x1 - x0) * resolution
        height = (y1 - y0) * resolution
        img = np.full((height, width, 3), 255, dtype=np.uint8)
        # Any translate whose bounding box meets the window can contribute.
        lo_b, hi_b = attractor.bounding_box(matrix, shifts)
        translates = [
            (tx, ty)
            for tx in range(x0 - int(hi_b[0] // 1) - 1, x1 - int(lo_b[0] // 1) + 1)
            for ty in range(y0 - int(hi_b[1] // 1) - 1, y1 - int(lo_b[1] // 1) + 1)
        ]
        for index, (tx, ty) in enumerate(sorted(translates)):
            color = PALETTE[index % len(PALETTE)]
            ox, oy = tx * resolution, ty * resolution
            for gx, gy in base:
                px = gx + ox - x0 * resolution
                py = gy + oy - y0 * resolution
                if 0 <= px < width and 0 <= py < height:
                    row = height - 1 - py
                    if tuple(img[row, px]) == (255, 255, 255):
                        img[row, px] = color
    else:
        xs = [c[0] for c in base]
        ys = [c[1] for c in base]
        ox, oy = min(xs), min(ys)
        width = max(xs) - ox + 1
        height = max(ys) - oy + 1
        img = np.full((height, width, 3), 255, dtype=np.uint8)
        for gx, gy in base:
            img[height - 1 - (gy - oy), gx - ox] = PALETTE[0]
    write_ppm(args.out, img)
    occupied = int(np.count_nonzero(np.any(img != 255, axis=2)))
    _emit({
        "kind": "render",
        "out": args.out,
        "width": int(img.shape[1]),
        "height": int(img.shape[0]),
        "resolution": resolution,
        "depth": depth,
        "occupied_pixels": occupied,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# box commands
# ---------------------------------------------------------------------------

def cmd_box_build(args) -> int:
    form = _boxform_from(args)
    matrix = boxtile.build_cyclic_matrix(form)
    digits = boxtile.box_digits(form)
    _emit({
        "kind": "box_build",
        "p": list(form.p),
        "sign": form.sign,
        "matrix": [list(r) for r in matrix],
        "digits": [list(v) for v in digits],
        "digit_count": len(digits),
        "expanding": lattice.is_expanding(matrix),
    })
    return EXIT_OK


def cmd_box_digits(args) -> int:
    form = _boxform_from(args)
    digits = boxtile.box_digits(form)
    _emit({
        "kind": "box_digits",
        "p": list(form.p),
        "sign": form.sign,
        "digits": [list(v) for v in digits],
        "digit_count": len(digits),
    })
    return EXIT_OK


def cmd_box_detect(args) -> int:
    if getattr(args, "p", None) or (
            getattr(args, "spec", None) and _load_spec(args.spec).get("kind") == "boxform"):
        form = _boxform_from(args)
        matrix = boxtile.build_cyclic_matrix(form)
        digits = boxtile.box_digits(form)
    else:
        matrix, digits, _ = _matrix_digits_from(args)
    depth = args.depth or boxtile.suggested_depth(matrix, digits)
    tol = args.tol if args.tol is not None else 0.05
    approx = attractor.approximate(matrix, digits, depth)
    try:
        report = boxtile.is_parallelepiped(approx, tol=tol)
    except boxtile.DegeneratePointCloudError as exc:
        raise InputError(f"degenerate point cloud: {exc}") from exc
    _emit({
        "kind": "box_detect",
        "matrix": [list(r) for r in matrix],
        "digits": [list(v) for v in digits],
        "depth": depth,
        "tol": tol,
        "is_box": report.is_box,
        "hull_volume": report.hull_volume,
        "fit_volume": report.fit_volume,
        "measure_estimate": report.measure_estimate,
        "edge_vectors": [list(e) for e in report.edge_vectors] if report.edge_vectors else None,
    })
    return EXIT_OK if report.is_box else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# haar commands
# ---------------------------------------------------------------------------

def cmd_haar_build(args) -> int:
    matrix, digits, _ = _matrix_digits_from(args)
    try:
        system = haar.build_wavelets(matrix, digits)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit({
        "kind": "haar_system",
        "matrix": matrix,
        "digits": [list(v) for v in digits],
        "generator_count": system.generator_count,
        "basis": [list(v) for v in system.basis.vectors],
        "pieces": [[[k, c] for k, c in row] for row in system.pieces],
    })
    return EXIT_OK


def cmd_haar_gram(args) -> int:
    matrix, digits, params = _matrix_digits_from(args)
    try:
        system = haar.build_wavelets(matrix, digits)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    method = args.method
    if method == "auto":
        method = "exact" if haar._is_box_system(system) else "raster"
    if method == "exact":
        gram = np.array(haar.exact_gram(system), dtype=float)
        edge_fraction = 0.0
    else:
        resolution = args.resolution or int(params.get("resolution", 64))
        depth = args.depth or int(params.get("depth", 12))
        gram, edge_fraction = haar.raster_gram(system, resolution, depth)
    n = system.generator_count
    dev = np.abs(gram - np.eye(n))
    off = float(np.max(dev - np.diag(np.diag(dev)))) if n > 1 else 0.0
    _emit({
        "kind": "haar_gram",
        "matrix": matrix,
        "digits": [list(v) for v in digits],
        "method": method,
        "generator_count": n,
        "max_offdiag": off,
        "max_diag_deviation": float(np.max(np.abs(np.diag(gram) - 1.0))),
        "edge_fraction": edge_fraction,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# oned commands
# ---------------------------------------------------------------------------

def cmd_oned_oracle(args) -> int:
    y = _parse_int_list(args.set, "set")
    try:
        y = oned.as_intset(y)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    n_max = args.n_max
    try:
        n, shifts = oned.tiling_oracle(y, n_max)
    except ValueError as exc:
        if isinstance(exc, oned.NotTilingError):
            _emit({
                "kind": "oned_oracle",
                "set": list(y),
                "tiles": False,
                "bound": exc.n_max,
            })
            return EXIT_NEGATIVE
        raise InputError(str(exc)) from exc
    _emit({
        "kind": "oned_oracle",
        "set": list(y),
        "tiles": True,
        "segment_length": n,
        "shifts": list(shifts),
    })
    return EXIT_OK


def cmd_oned_classify(args) -> int:
    y = _parse_int_list(args.set, "set")
    try:
        y = oned.as_intset(y)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    try:
        progressions = oned.classify(y)
    except oned.NotSimpleError as exc:
        _emit({
            "kind": "oned_classify",
            "set": list(y),
            "simple": False,
            "reason": str(exc),
        })
        return EXIT_NEGATIVE
    _emit({
        "kind": "oned_classify",
        "set": list(y),
        "simple": True,
        "progressions": [{"a": p.a, "d": p.d} for p in progressions],
    })
    return EXIT_OK


def cmd_oned_enumerate(args) -> int:
    if args.n < 1:
        raise InputError("N must be at least 1")
    sets = oned.enumerate_simple(args.n)
    _emit({
        "kind": "oned_enumerate",
        "n": args.n,
        "count": len(sets),
        "sets": [list(s) for s in sets],
    })
    return EXIT_OK


def cmd_oned_lset(args) -> int:
    xs = _parse_int_list(args.set, "set")
    if args.l <= 0:
        raise InputError("block length must be positive")
    ok = oned.is_l_set(xs, args.l)
    _emit({
        "kind": "oned_lset",
        "set": sorted(set(xs)),
        "l": args.l,
        "is_l_set": ok,
    })
    return EXIT_OK if ok else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# product command
# ---------------------------------------------------------------------------

def cmd_product(args) -> int:
    m1 = _parse_json_field(args.matrix1, "--matrix1")
    s1 = _parse_json_field(args.shifts1, "--shifts1")
    m2 = _parse_json_field(args.matrix2, "--matrix2")
    s2 = _parse_json_field(args.shifts2, "--shifts2")
    s1 = [v if hasattr(v, "__len__") else (v,) for v in s1]
    s2 = [v if hasattr(v, "__len__") else (v,) for v in s2]
    matrix, shifts = boxtile.tensor_product(m1, s1, m2, s2)
    _emit({
        "kind": "product",
        "matrix": [list(r) for r in matrix],
        "shifts": [list(v) for v in shifts],
        "dims": [len(m1), len(m2)],
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_system_flags(p, shifts=False):
    p.add_argument("--spec", help="problem spec JSON file")
    p.add_argument("--matrix", help="integer matrix as JSON, e.g. [[1,1],[-1,1]]")
    p.add_argument("--digits", help="digit set as JSON, e.g. [[0,0],[1,0]]")
    if shifts:
        p.add_argument("--shifts", help="shift set as JSON (alias for --digits)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tileforge",
                                 description="self-affine tiles and attractors")
    sub = ap.add_subparsers(dest="command", required=True)

    tile = sub.add_parser("tile", help="tile verification and rendering")
    tsub = tile.add_subparsers(dest="subcommand", required=True)
    p = tsub.add_parser("check", help="contact-matrix tile test")
    _add_system_flags(p)
    p.add_argument("--depth", type=int, help="measure/layer depth (default 10)")
    p.set_defaults(func=cmd_tile_check)
    p = tsub.add_parser("measure", help="measure upper bound")
    _add_system_flags(p)
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_tile_measure)
    p = tsub.add_parser("render", help="render attractor to PPM")
    _add_system_flags(p, shifts=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--out", required=True, help="output PPM path")
    p.add_argument("--tiling", help="translate window x0:x1,y0:y1 for a tiling image")
    p.set_defaults(func=cmd_tile_render)

    box = sub.add_parser("box", help="cyclic-form box tiles")
    bsub = box.add_subparsers(dest="subcommand", required=True)
    for name, fn in (("build", cmd_box_build), ("digits", cmd_box_digits)):
        p = bsub.add_parser(name)
        p.add_argument("-p", help="comma-separated edge splits, e.g. 1,1,2")
        p.add_argument("--sign", help="+ or -")
        p.add_argument("--spec", help="boxform spec JSON file")
        p.set_defaults(func=fn)
    p = bsub.add_parser("detect", help="numeric parallelepiped check")
    _add_system_flags(p)
    p.add_argument("-p", help="boxform edge splits (build then detect)")
    p.add_argument("--sign")
    p.add_argument("--depth", type=int)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_box_detect)

    hr = sub.add_parser("haar", help="wavelet systems from tiles")
    hsub = hr.add_subparsers(dest="subcommand", required=True)
    p = hsub.add_parser("build")
    _add_system_flags(p)
    p.set_defaults(func=cmd_haar_build)
    p = hsub.add_parser("gram")
    _add_system_flags(p)
    p.add_argument("--method", choices=("auto", "exact", "raster"), default="auto")
    p.add_argument("--resolution", type=int)
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_haar_gram)

    od = sub.add_parser("oned", help="one-dimensional integer tilings")
    osub = od.add_subparsers(dest="subcommand", required=True)
    p = osub.add_parser("oracle")
    p.add_argument("set", help="comma-separated set, e.g. 0,3,6,18,21,24")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.set_defaults(func=cmd_oned_oracle)
    p = osub.add_parser("classify")
    p.add_argument("set")
    p.set_defaults(func=cmd_oned_classify)
    p = osub.add_parser("enumerate")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_oned_enumerate)
    p = osub.add_parser("lset")
    p.add_argument("set")
    p.add_argument("--l", type=int, required=True)
    p.set_defaults(func=cmd_oned_lset)

    p = sub.add_parser("product", help="tensor product of two systems")
    p.add_argument("--matrix1", required=True)
    p.add_argument("--shifts1", required=True)
    p.add_argument("--matrix2", required=True)
    p.add_argument("--shifts2", required=True)
    p.set_defaults(func=cmd_product)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except attractor.ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
