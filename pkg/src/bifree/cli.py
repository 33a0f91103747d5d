"""Command-line interface.

Subcommands: ``lattice``, ``cumulants``, ``moments``, ``dq``,
``conjugate-check``, ``gaussian {fisher|entropy|dimension|moments}``,
``bipartite {fisher|conjugate|make-semicircular}``, ``selftest``.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence.
Error text goes to standard error.  Rationals are serialized as ``"p/q"``
strings in JSON and floats with 12 significant digits; text output uses 11
significant digits.  Existing files are never overwritten without --force.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

from . import bipartite_num as bp
from . import gaussfam as gf
from .bnclattice import (
    CapExceededError,
    enumerate_bnc,
    mobius_zero_one,
    validate_chi,
)
from .cumulant import (
    CumulantMomentFunctional,
    DegreeBoundError,
    cumulant_chi,
    load_spec,
)
from .derivation import QuotientKind, bifree_dq, conjugate_check
from .ncalg import (
    LEFT,
    RIGHT,
    VAR,
    AlgebraMode,
    ArityError,
    format_tensor,
    format_word,
    letter_from_token,
    parse_poly,
)
from .selftest import run_selftest


class CliError(ValueError):
    pass


def _fmt_float(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.11g}"


def _jfloat(v: float):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.12g}")


def _write_output(text: str, args) -> None:
    out = getattr(args, "out", None)
    if out:
        if os.path.exists(out) and not getattr(args, "force", False):
            raise CliError(f"refusing to overwrite {out} without --force")
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")
    else:
        print(text)


def _emit(payload: dict, args, default_format: str, text_fn) -> None:
    fmt = getattr(args, "format", None) or default_format
    if fmt == "json":
        _write_output(json.dumps(payload, indent=2), args)
    elif fmt == "text":
        _write_output(text_fn(payload), args)
    elif fmt == "csv":
        rows = payload.get("csv")
        if rows is None:
            raise CliError("this subcommand has no CSV form")
        _write_output("\n".join(",".join(str(v) for v in row) for row in rows), args)
    else:
        raise CliError(f"unknown format {fmt!r}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write output to this path instead of stdout")
    parser.add_argument("--format", choices=["json", "csv", "text"], default=None)
    parser.add_argument("--force", action="store_true", help="allow overwriting --out")
    parser.add_argument("--quiet", action="store_true", help="suppress warnings")


def _infer_mode(poly_text: str, mode_name: str, left_arity, right_arity, extra=()):
    max_left = 0
    max_right = 0
    for token in poly_text.replace("⊗", " ").split():
        body = token.partition("*")[2] if "*" in token else token
        if not body or body[0] not in "XYxy":
            continue
        letter = letter_from_token(body)
        if letter.kind == VAR:
            if letter.side == LEFT:
                max_left = max(max_left, letter.index)
            else:
                max_right = max(max_right, letter.index)
    for side, index in extra:
        if side == LEFT:
            max_left = max(max_left, index)
        else:
            max_right = max(max_right, index)
    n = left_arity if left_arity is not None else max_left
    m = right_arity if right_arity is not None else max_right
    return AlgebraMode(mode_name, n, m)


# -- subcommand handlers --------------------------------------------------------


def _cmd_lattice(args) -> int:
    chi = validate_chi(tuple(args.chi))
    partitions = enumerate_bnc(chi, cap=args.cap)
    payload = {
        "chi": "".join(chi),
        "count": len(partitions),
        "partitions": [[list(b) for b in p.blocks] for p in partitions],
        "mobius_0_to_1": mobius_zero_one(chi),
    }

    def text(p):
        lines = [f"chi = {p['chi']}", f"count = {p['count']}",
                 f"mobius(0,1) = {p['mobius_0_to_1']}"]
        lines += [str(blocks) for blocks in p["partitions"]]
        return "\n".join(lines)

    _emit(payload, args, "json", text)
    return 0


def _functional_from_spec(path: str):
    spec = load_spec(path)
    mode = AlgebraMode("free", spec.n, spec.m)
    return spec, mode, CumulantMomentFunctional(mode, spec)


def _cmd_cumulants(args) -> int:
    spec, mode, phi = _functional_from_spec(args.spec)
    word = []
    for token in args.word.split():
        if token == "1":
            continue
        word.append(letter_from_token(token))
    mode.check_word(tuple(word))
    if not word:
        raise CliError("cumulants need at least one letter")
    chi = tuple(l.side for l in word)
    value = cumulant_chi(phi, chi, [(l,) for l in word])
    payload = {"word": args.word, "chi": "".join(chi), "value": str(value)}
    _emit(payload, args, "json", lambda p: p["value"])
    return 0


def _cmd_moments(args) -> int:
    spec, mode, phi = _functional_from_spec(args.spec)
    word = []
    for token in args.word.split():
        if token == "1":
            continue
        word.append(letter_from_token(token))
    value = phi.phi(tuple(word))
    payload = {"word": args.word, "value": str(value)}
    _emit(payload, args, "json", lambda p: p["value"])
    return 0


def _cmd_dq(args) -> int:
    side = LEFT if args.side == "left" else RIGHT
    mode = _infer_mode(
        args.poly, args.mode, args.left_arity, args.right_arity, extra=[(side, args.index)]
    )
    p = parse_poly(args.poly, mode)
    kind = QuotientKind(side, args.index, flipped=args.flipped)
    result = bifree_dq(p, kind, mode)
    literal = format_tensor(result)
    payload = {"input": args.poly, "side": args.side, "index": args.index,
               "flipped": args.flipped, "mode": mode.mode, "tensor": literal}
    _emit(payload, args, "text", lambda pl: pl["tensor"])
    return 0


def _cmd_conjugate_check(args) -> int:
    spec = load_spec(args.spec)
    mode = AlgebraMode(args.mode, spec.n, spec.m)
    phi = CumulantMomentFunctional(mode, spec)
    xi = parse_poly(args.xi, mode)
    side = LEFT if args.side == "left" else RIGHT
    report = conjugate_check(phi, QuotientKind(side, args.index), xi, args.max_degree, mode)
    failure = None
    if report.first_failure:
        word, lhs, rhs = report.first_failure
        failure = {"word": format_word(word), "lhs": str(lhs), "rhs": str(rhs)}
    payload = {
        "passed": report.passed,
        "checked": report.checked,
        "max_degree": report.max_degree,
        "first_failure": failure,
    }

    def text(p):
        if p["passed"]:
            return f"PASS ({p['checked']} words up to degree {p['max_degree']})"
        f = p["first_failure"]
        return f"FAIL at {f['word']}: {f['lhs']} != {f['rhs']}"

    _emit(payload, args, "json", text)
    return 0


def _load_covariance(path: str) -> gf.Covariance:
    with open(path, encoding="utf-8") as handle:
        return gf.Covariance.from_json_dict(json.load(handle))


def _cmd_gaussian_fisher(args) -> int:
    cov = _load_covariance(args.cov)
    value = gf.fisher(cov) if args.t is None else gf.fisher_perturbed(cov, args.t)
    payload = {"fisher": _jfloat(value), "t": args.t}
    _emit(payload, args, "text", lambda p: _fmt_float(value))
    return 0


def _cmd_gaussian_entropy(args) -> int:
    cov = _load_covariance(args.cov)
    if args.method == "closed":
        value = gf.entropy_closed(cov)
        payload = {"entropy": _jfloat(value), "method": "closed"}
    else:
        result = gf.entropy_quadrature(
            lambda t: gf.fisher_perturbed(cov, t),
            cov.size,
            gf.QuadConfig(tol=args.quad_tol),
        )
        value = result.value
        payload = {
            "entropy": _jfloat(result.value),
            "error_bound": _jfloat(result.error_bound),
            "evaluations": result.evaluations,
            "method": "quadrature",
        }
    _emit(payload, args, "text", lambda p: _fmt_float(value))
    return 0


def _cmd_gaussian_dimension(args) -> int:
    cov = _load_covariance(args.cov)
    if args.method == "closed":
        value: float | int = gf.entropy_dimension(cov)
    else:
        value = gf.entropy_dimension_limit(
            lambda t: gf.fisher_perturbed(cov, t), cov.size
        )
    payload = {"dimension": value if isinstance(value, int) else _jfloat(value),
               "method": args.method}
    _emit(payload, args, "text",
          lambda p: str(value) if isinstance(value, int) else _fmt_float(value))
    return 0


def _parse_pattern(text: str):
    pattern = []
    for token in text.split():
        side = token[0]
        if side not in (LEFT, RIGHT):
            raise CliError(f"pattern tokens look like l1 or r2, got {token!r}")
        pattern.append((side, int(token[1:])))
    return pattern


def _cmd_gaussian_moments(args) -> int:
    cov = _load_covariance(args.cov)
    pattern = _parse_pattern(args.pattern)
    value = gf.gaussian_moment(cov, pattern)
    payload = {"pattern": args.pattern, "moment": _jfloat(value)}
    if args.depth is not None:
        model = gf.build_fock_model(cov, args.depth)
        payload["fock"] = _jfloat(gf.fock_moment(model, pattern))
    _emit(payload, args, "text", lambda p: _fmt_float(value))
    return 0


def _grid_from_args(args) -> bp.DensityGrid:
    if args.grid:
        if args.grid_csv:
            return bp.load_density_csv(args.grid, args.grid_csv)
        return bp.load_density(args.grid)
    if args.c is None:
        raise CliError("provide --grid FILE or --c C")
    return bp.semicircular_density(args.c, bp.GridSpec(args.n, args.n))


def _field_config(args) -> bp.FieldConfig:
    return bp.FieldConfig(eps=args.eps, richardson=args.richardson)


def _cmd_bipartite_fisher(args) -> int:
    grid = _grid_from_args(args)
    value = bp.fisher_numeric(grid, _field_config(args))
    payload = {"fisher": _jfloat(value)}
    _emit(payload, args, "text", lambda p: _fmt_float(value))
    return 0


def _cmd_bipartite_conjugate(args) -> int:
    grid = _grid_from_args(args)
    fld = bp.conjugate_field(grid, _field_config(args))
    payload = {
        "xmin": float(grid.x[0]),
        "xmax": float(grid.x[-1]),
        "ymin": float(grid.y[0]),
        "ymax": float(grid.y[-1]),
        "nx": grid.nx,
        "ny": grid.ny,
        "eps_x": fld.eps_x,
        "eps_y": fld.eps_y,
        "xi_left": fld.xi_left.tolist(),
        "xi_right": fld.xi_right.tolist(),
        "mask": fld.mask.astype(int).tolist(),
    }
    _emit(payload, args, "json",
          lambda p: f"conjugate fields on {p['nx']}x{p['ny']} grid")
    return 0


def _cmd_bipartite_make(args) -> int:
    grid = bp.semicircular_density(args.c, bp.GridSpec(args.n, args.n))
    if not args.out:
        raise CliError("make-semicircular requires --out")
    fmt = args.format or "json"
    if os.path.exists(args.out) and not args.force:
        raise CliError(f"refusing to overwrite {args.out} without --force")
    if fmt == "json":
        bp.save_density(grid, args.out)
    elif fmt == "csv":
        csv_path = (args.out[:-5] if args.out.endswith(".json") else args.out) + ".csv"
        if os.path.exists(csv_path) and not args.force:
            raise CliError(f"refusing to overwrite {csv_path} without --force")
        bp.save_density_csv(grid, args.out, csv_path)
    else:
        raise CliError("make-semicircular writes json or csv")
    if not args.quiet:
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _cmd_selftest(args) -> int:
    return run_selftest(fast=args.fast)


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bifree",
        description="Two-faced noncommutative probability: lattices, cumulants, "
        "difference quotients, conjugate variables, Fisher information and entropy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="enumerate a bi-non-crossing lattice")
    p.add_argument("--chi", required=True, help="side sequence, e.g. lrlr")
    p.add_argument("--cap", type=int, default=12)
    _add_common(p)
    p.set_defaults(handler=_cmd_lattice)

    p = sub.add_parser("cumulants", help="cumulant of a word under a cumulant spec")
    p.add_argument("--spec", required=True, help="cumulant spec JSON file")
    p.add_argument("--word", required=True, help="letters, e.g. 'X1 Y1 X1'")
    _add_common(p)
    p.set_defaults(handler=_cmd_cumulants)

    p = sub.add_parser("moments", help="moment of a word under a cumulant spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--word", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_moments)

    p = sub.add_parser("dq", help="apply a difference quotient to a polynomial")
    p.add_argument("poly", help="polynomial literal, e.g. 'X1 X1 Y1'")
    p.add_argument("--side", choices=["left", "right"], required=True)
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--flipped", action="store_true")
    p.add_argument("--mode", choices=["free", "bipartite"], default="bipartite")
    p.add_argument("--left-arity", type=int, default=None)
    p.add_argument("--right-arity", type=int, default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_dq)

    p = sub.add_parser("conjugate-check", help="verify a polynomial conjugate variable")
    p.add_argument("--spec", required=True)
    p.add_argument("--xi", required=True, help="candidate polynomial literal")
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--mode", choices=["free", "bipartite"], default="bipartite")
    _add_common(p)
    p.set_defaults(handler=_cmd_conjugate_check)

    gaussian = sub.add_parser("gaussian", help="central-limit family computations")
    gsub = gaussian.add_subparsers(dest="gaussian_command", required=True)

    p = gsub.add_parser("fisher")
    p.add_argument("--cov", required=True, help="covariance JSON file")
    p.add_argument("--t", type=float, default=None, help="perturbation time")
    _add_common(p)
    p.set_defaults(handler=_cmd_gaussian_fisher)

    p = gsub.add_parser("entropy")
    p.add_argument("--cov", required=True)
    p.add_argument("--method", choices=["closed", "quadrature"], default="closed")
    p.add_argument("--quad-tol", type=float, default=1e-9)
    _add_common(p)
    p.set_defaults(handler=_cmd_gaussian_entropy)

    p = gsub.add_parser("dimension")
    p.add_argument("--cov", required=True)
    p.add_argument("--method", choices=["closed", "limit"], default="closed")
    _add_common(p)
    p.set_defaults(handler=_cmd_gaussian_dimension)

    p = gsub.add_parser("moments")
    p.add_argument("--cov", required=True)
    p.add_argument("--pattern", required=True, help="e.g. 'l1 r1 l1 r1'")
    p.add_argument("--depth", type=int, default=None,
                   help="also evaluate in the Fock model at this truncation depth")
    _add_common(p)
    p.set_defaults(handler=_cmd_gaussian_moments)

    bipartite = sub.add_parser("bipartite", help="joint-density numerics")
    bsub = bipartite.add_subparsers(dest="bipartite_command", required=True)

    def add_grid_args(p):
        p.add_argument("--grid", default=None, help="density grid JSON file")
        p.add_argument("--grid-csv", default=None, help="values CSV (with --grid header)")
        p.add_argument("--c", type=float, default=None,
                       help="build the semicircular family with this covariance")
        p.add_argument("--n", type=int, default=512, help="grid points per axis")
        p.add_argument("--eps", type=float, default=None,
                       help="kernel regularization (default: one grid spacing)")
        p.add_argument("--richardson", action="store_true")

    p = bsub.add_parser("fisher")
    add_grid_args(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_bipartite_fisher)

    p = bsub.add_parser("conjugate")
    add_grid_args(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_bipartite_conjugate)

    p = bsub.add_parser("make-semicircular")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--n", type=int, default=512)
    _add_common(p)
    p.set_defaults(handler=_cmd_bipartite_make)

    p = sub.add_parser("selftest", help="run the golden-example suite")
    p.add_argument("--fast", action="store_true",
                   help="smaller grids, looser numeric thresholds")
    p.set_defaults(handler=_cmd_selftest)

    return parser


VALIDATION_ERRORS = (
    CliError,
    ArityError,
    CapExceededError,
    DegreeBoundError,
    bp.ZeroMassError,
    gf.SingularCovarianceError,
    ValueError,
    OSError,
    json.JSONDecodeError,
)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    if getattr(args, "quiet", False):
        warnings.simplefilter("ignore")
    try:
        return args.handler(args)
    except gf.NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
