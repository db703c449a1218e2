"""Command line interface: ``dunkl <command> ... --config cfg.json``.

Exit codes: 0 all checks passed, 1 some check failed, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from ..algebra import EXACT, FLOAT, DimensionError, ModeError, format_poly, parse_poly
from ..intertwine import DegreeError, SingularMultiplicityError, build_vk
from ..kernel import KernelTruncation, TailTooLarge, bessel_eval, gram_psd_check, kernel_eval
from ..pairing import pairing
from .config import ConfigError, load_config
from .families import GridScanner
from .report import Report, jsonable
from .suites import SUITES, THEOREM, _family, _grid


def parse_complex(text: str) -> tuple:
    """``"1/2"``, ``"i"``, ``"-2i"``, ``"1+3/4i"`` -> ``(re, im)`` as Fractions."""
    t = text.replace(" ", "")
    if not t:
        raise ValueError("empty number")
    if not t.endswith("i"):
        return Fraction(t), Fraction(0)
    body = t[:-1]
    cut = max(body.rfind("+"), body.rfind("-"))
    real, imag = (body[:cut], body[cut:]) if cut > 0 else ("", body)
    if imag in ("", "+"):
        im_part = Fraction(1)
    elif imag == "-":
        im_part = Fraction(-1)
    else:
        im_part = Fraction(imag)
    return (Fraction(real) if real else Fraction(0)), im_part


def parse_vector(text: str, complex_ok: bool = False) -> list:
    parts = [p for p in text.split(",") if p.strip()]
    out = []
    for p in parts:
        re_part, im_part = parse_complex(p)
        if im_part and not complex_ok:
            raise ValueError(f"real coordinates expected, got {p!r}")
        out.append((re_part, im_part) if complex_ok else re_part)
    return out


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _load(args):
    cfg = load_config(args.config)
    return cfg.with_overrides(mode=args.mode, seed=args.seed, n_max=args.order)


def _poly(text, dim, mode):
    p = parse_poly(text, dim, EXACT)
    return p if mode == EXACT else p.to_float()


# --------------------------------------------------------------------------
# commands


def cmd_group(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    info = params.roots.describe()
    info["group_order"] = params.get_group().order
    info["orbit_values"] = [str(v) for v in params.k.orbit_values]
    _emit(json.dumps(info, indent=2), args.out)
    return 0


def cmd_vk(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    if args.action == "build":
        table = build_vk(params, cfg.n_max)
        _emit(json.dumps(table.to_json(), indent=1), args.out)
        return 0
    if not args.poly:
        raise ConfigError("vk apply needs --poly")
    p = _poly(args.poly, params.dim, cfg.mode)
    order = max(p.degree, 0) if args.order is None else cfg.n_max
    table = build_vk(params, order)
    _emit(format_poly(table.apply(p)), args.out)
    return 0


def cmd_moments(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    nu = tuple(int(c) for c in args.nu.split(","))
    if len(nu) != params.dim:
        raise ConfigError(f"--nu needs {params.dim} entries")
    table = build_vk(params, sum(nu))
    _emit(format_poly(table.image(nu)), args.out)
    return 0


def cmd_kernel(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    order = args.order if args.order is not None else 20
    tr = KernelTruncation.build(params, order)
    y = parse_vector(args.y, complex_ok=True)
    if args.action == "eval":
        x = parse_vector(args.x)
        fn = bessel_eval if args.bessel else kernel_eval
        v = fn(tr, x, y)
        rec = v.record(point={"x": [str(c) for c in x], "y": [f"{a}+{b}i" for a, b in y]})
        _emit(json.dumps(rec, indent=2), args.out)
        return 0
    points = [parse_vector(p) for p in args.points.split(";") if p.strip()]
    if any(b for _, b in y):
        raise ConfigError("--y for a Gram matrix is the real vector multiplying i")
    g = gram_psd_check(tr, points, [a for a, _ in y], tol=args.tol, function="J" if args.bessel else "K")
    rec = {"points": jsonable(points), "lambda_min": g.lambda_min, "tail_bound": g.tail,
           "order": order, "pass": g.passed}
    _emit(json.dumps(rec, indent=2), args.out)
    return 0 if g.passed else 1


def cmd_pairing(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    p = _poly(args.p, params.dim, cfg.mode)
    q = _poly(args.q, params.dim, cfg.mode)
    _emit(str(pairing(params, p, q)), args.out)
    return 0


def cmd_verify(args) -> int:
    cfg = _load(args)
    report = SUITES[args.suite](cfg)
    _emit(report.to_json(timings=not args.no_timings), args.out)
    return 0 if report.passed else 1


def cmd_scan(args) -> int:
    cfg = _load(args)
    if cfg.mode != EXACT:
        raise ConfigError("positivity scans run in exact mode")
    params = cfg.params()
    report = Report("scan_positivity")
    if args.poly:
        family = [(args.poly, parse_poly(args.poly, params.dim))]
    else:
        family = _family(cfg, params.dim)
    deg = max(p.degree for _, p in family)
    table = build_vk(params, deg)
    scanner = GridScanner(_grid(cfg, params.dim), max(deg, 0))
    for label, p in family:
        res = scanner.scan(table.apply(p))
        report.add("vk_nonnegative", {"p": label, "grid_points": res.points}, THEOREM, res.ok,
                   margin=res.minimum,
                   witness=None if res.ok else {"point": res.argmin, "value": res.minimum})
    report.finish()
    _emit(report.to_json(timings=not args.no_timings), args.out)
    return 0 if report.passed else 1


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--order", type=int, help="working degree / truncation order")
    p.add_argument("--seed", type=int, help="seed for generated families and points")
    p.add_argument("--mode", choices=(EXACT, FLOAT), help="override the config mode")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--no-timings", action="store_true", help="report wall_ms as 0 (byte-stable reports)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dunkl", description="Dunkl operators and the intertwining operator")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="describe the configured root system")
    g.add_argument("action", choices=("describe",))
    _common(g)
    g.set_defaults(func=cmd_group)

    v = sub.add_parser("vk", help="build V_k or apply it to a polynomial")
    v.add_argument("action", choices=("build", "apply"))
    v.add_argument("--poly", help='polynomial such as "3/2*x1^2*x2 - x2"')
    _common(v)
    v.set_defaults(func=cmd_vk)

    m = sub.add_parser("moments", help="moment function V_k(x^nu)")
    m.add_argument("--nu", required=True, help="multi-index, e.g. 2,1")
    _common(m)
    m.set_defaults(func=cmd_moments)

    k = sub.add_parser("kernel", help="truncated kernel values and Gram matrices")
    k.add_argument("action", choices=("eval", "gram"))
    k.add_argument("--x", help="point, e.g. 1,1/2")
    k.add_argument("--y", required=True, help="second argument; complex entries like i, 2i, 1-i")
    k.add_argument("--points", help="Gram points separated by ';', e.g. '0;1/2;1'")
    k.add_argument("--bessel", action="store_true", help="use the group-averaged Bessel function")
    k.add_argument("--tol", type=float, default=1e-8)
    _common(k)
    k.set_defaults(func=cmd_kernel)

    p = sub.add_parser("pairing", help="[p, q]_k")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    _common(p)
    p.set_defaults(func=cmd_pairing)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    _common(ver)
    ver.set_defaults(func=cmd_verify)

    sc = sub.add_parser("scan", help="grid scans")
    sc.add_argument("what", choices=("positivity",))
    sc.add_argument("--poly", help="scan V_k of this polynomial instead of the generated family")
    _common(sc)
    sc.set_defaults(func=cmd_scan)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "kernel":
        if args.action == "eval" and not args.x:
            print("error: kernel eval needs --x", file=sys.stderr)
            return 2
        if args.action == "gram" and not args.points:
            print("error: kernel gram needs --points", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except (ConfigError, ValueError, ModeError, DimensionError, DegreeError, SingularMultiplicityError,
            TailTooLarge) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
