"""Command-line front end.

Exit codes: 0 success, 1 numerical failure, 2 usage or precondition error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import rootdata
from .config import ConfigError, RunConfig, load_config
from .merocont import NoUniqueSolutionError, NotFredholmError, PoleProximityError, WitnessViolationError
from .merocont.demos import DEMO_CASES, run_demo
from .sl2.geometry import HPoint, reduce_to_fundamental
from .sl2.series import DivergenceError, eisenstein_series
from .sl2.system import (BandTooWideError, FitFailureError, KernelTransformVanishingError,
                         ResidualFailureError, continue_eisenstein)
from .specfn import SingularityError, m_closed

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

MSCAN_COLUMNS = ["s_re", "s_im", "m_est_re", "m_est_im", "m_closed_re", "m_closed_im", "abs_err",
                 "denom_abs", "max_residual", "status", "error"]

PRECONDITION_ERRORS = (ConfigError, DivergenceError, BandTooWideError, KernelTransformVanishingError)
NUMERIC_ERRORS = (ResidualFailureError, FitFailureError, NoUniqueSolutionError, NotFredholmError,
                  WitnessViolationError, np.linalg.LinAlgError)


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    if t.endswith("j") and t[:-1] in ("", "+", "-"):
        t = t[:-1] + "1j"
    try:
        return complex(t)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_complex_list(text: str) -> list:
    return [parse_complex(t) for t in text.split(",") if t.strip()]


def parse_pair(text: str) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated numbers, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r}") from exc


def _cpx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _config_from_args(args) -> RunConfig:
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    return load_config(args.config, overrides)


def _config_echo(cfg: RunConfig) -> dict:
    return {k: (list(map(_cpx, v)) if isinstance(v, tuple) else v) for k, v in cfg.to_flat().items()}


def _emit(args, payload: dict, text: str):
    if args.json:
        payload.setdefault("config", _config_echo(_config_from_args(args)))
        print(json.dumps(payload, indent=2))
    else:
        print(text)


# ------------------------------------------------------------------ commands

def cmd_eval(args) -> int:
    x, y = parse_pair(args.z)
    s = parse_complex(args.s)
    if args.M < 1:
        raise UsageError("--M must be >= 1")
    point = HPoint(x, y)
    value, bound = eisenstein_series(point, s, args.M)
    red, gam = reduce_to_fundamental(point)
    payload = {"schema": "eisencont.eval/1", "z": [x, y], "reduced": [red.x, red.y],
               "gamma": [list(gam[0]), list(gam[1])], "s": _cpx(s), "M": args.M,
               "value": _cpx(value), "tail_bound": bound}
    text = (f"E(z; s) at z = {x}+{y}i, s = {s}, M = {args.M}\n"
            f"  reduced z = {red.x!r}+{red.y!r}i\n  value      = {value!r}\n  tail bound = {bound:.3e}")
    _emit(args, payload, text)
    return EXIT_OK


def _mscan_points(args) -> list:
    if args.s:
        pts = parse_complex_list(args.s)
    elif args.re_range:
        a, b = parse_pair(args.re_range)
        im_lo, im_hi = parse_pair(args.im_range) if args.im_range else (0.0, 0.0)
        n_im = args.n_im if args.im_range else 1
        pts = [complex(r, i) for i in np.linspace(im_lo, im_hi, n_im) for r in np.linspace(a, b, args.n_re)]
    else:
        pts = []
    if not pts:
        raise UsageError("mscan needs a nonempty --s list or a --re-range grid")
    return pts


def _mscan_row(s: complex, cfg: RunConfig) -> dict:
    row = dict.fromkeys(MSCAN_COLUMNS, "")
    row["s_re"], row["s_im"] = s.real, s.imag
    try:
        mc = m_closed(s)
        row["m_closed_re"], row["m_closed_im"] = mc.real, mc.imag
    except SingularityError:
        mc = None
    try:
        res = continue_eisenstein(s, cfg)
    except PoleProximityError as exc:
        row.update(status="pole_proximity", denom_abs=abs(exc.d), error=str(exc))
        return row
    except PRECONDITION_ERRORS as exc:
        row.update(status="precondition", error=f"{type(exc).__name__}: {exc}")
        return row
    except NUMERIC_ERRORS as exc:
        row.update(status="failed", error=f"{type(exc).__name__}: {exc}")
        return row
    m = res.m_estimate
    row.update(m_est_re=m.real, m_est_im=m.imag, denom_abs=abs(res.denominator_value),
               max_residual=res.max_residual, status="ok")
    if mc is not None:
        row["abs_err"] = abs(m - mc)
    return row


def cmd_mscan(args) -> int:
    cfg = _config_from_args(args)
    pts = _mscan_points(args)
    rows = []
    if args.workers > 1 and not args.strict:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(lambda s: _mscan_row(s, cfg), pts))
    else:
        for s in pts:
            row = _mscan_row(s, cfg)
            rows.append(row)
            if args.strict and row["status"] != "ok":
                break
    statuses = [r["status"] for r in rows]
    if "precondition" in statuses and args.strict:
        code = EXIT_USAGE
    elif "failed" in statuses or (args.strict and any(st != "ok" for st in statuses)):
        code = EXIT_NUMERIC
    else:
        code = EXIT_OK
    flat = cfg.to_flat()
    payload = {"schema": "eisencont.mscan/1", "seed": cfg.continuation.seed, "config": _config_echo(cfg),
               "columns": MSCAN_COLUMNS, "rows": rows, "exit_code": code}
    out_path = args.csv or cfg.output.csv
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
        if out_path:
            _write_csv(out_path, rows, flat, cfg)
    else:
        text = _write_csv(out_path, rows, flat, cfg)
        if text is not None:
            sys.stdout.write(text)
    json_path = cfg.output.json
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=2, default=str)
    return code


def _write_csv(path, rows, flat, cfg):
    buf = io.StringIO()
    buf.write(f"# seed = {cfg.continuation.seed}\n")
    for k, v in flat.items():
        buf.write(f"# {k} = {v}\n")
    prec = cfg.output.precision
    writer = csv.DictWriter(buf, fieldnames=MSCAN_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (f"{v:.{prec}g}" if isinstance(v, float) else v) for k, v in r.items()})
    if path:
        with open(path, "w") as fh:
            fh.write(buf.getvalue())
        return None
    return buf.getvalue()


def cmd_weyl(args) -> int:
    try:
        P = rootdata.Composition.parse(args.p, args.n)
        Q = rootdata.Composition.parse(args.q, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    q = args.query
    payload = {"schema": "eisencont.weyl/1", "n": args.n, "P": list(P.parts), "Q": list(Q.parts), "query": q}
    if q in ("cosets", "omega", "omega-semi"):
        fn = {"cosets": rootdata.double_coset_reps, "omega": rootdata.omega, "omega-semi": rootdata.omega_semi}[q]
        elems = fn(P, Q)
        payload["elements"] = [list(w.one_based()) for w in elems]
        payload["lengths"] = [w.length() for w in elems]
        text = "\n".join(f"{w}  (length {w.length()})" for w in elems) or "(none)"
    elif q == "delta":
        try:
            items = rootdata.delta_P(P)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        payload["delta_P"] = [{"root": [str(c) for c in a.coords], "simple_coefficients": [str(c) for c in co]}
                              for a, co in items]
        text = "\n".join(f"{a}  = sum {tuple(str(c) for c in co)} * simple roots" for a, co in items)
    elif q == "separation":
        try:
            cp = rootdata.chamber_separation(args.c, P, Q, seed=args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        payload["c"], payload["c_prime"], payload["seed"] = args.c, cp, args.seed
        text = f"c' = {cp} for c = {args.c}"
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown query {q!r}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_engine_demo(args) -> int:
    result = run_demo(args.case)
    payload = {"schema": "eisencont.engine_demo/1", **result}
    ex = result["exact"]
    lines = [f"case {args.case}"]
    for i, v in enumerate(ex["values"]):
        lines.append(f"  v[{i}](s) = {v}")
    lines.append("  denominator factors: " + (", ".join(
        f"({' '.join(f['factor'])})^{f['multiplicity']}" for f in ex["pole_divisor"]) or "none"))
    lines.append("  poles: " + (", ".join(f"{complex(*p):.6g}" for p in result["poles"]) or "none"))
    worst = max(r["rel_diff"] for r in result["numeric"]["samples"])
    lines.append(f"  numeric vs exact: max relative difference {worst:.2e} (k = {result['numeric']['k']})")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--config", help="flat key = value config file (default: $EISEN_CONFIG)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")

    parser = argparse.ArgumentParser(prog="eisencont", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="truncated Eisenstein series at a point")
    p.add_argument("--z", required=True, help="x,y coordinates of the point")
    p.add_argument("--s", required=True, help="complex s with Re s > 1")
    p.add_argument("--M", type=int, default=200, help="truncation bound on max(|m|,|n|)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mscan", parents=[common], help="continued m(s) over a list or grid of s")
    p.add_argument("--s", help="comma-separated complex values, e.g. 0.75,0.6+0.25i")
    p.add_argument("--re-range", help="lo,hi for a real-part grid")
    p.add_argument("--n-re", type=int, default=20)
    p.add_argument("--im-range", help="lo,hi for an imaginary-part grid")
    p.add_argument("--n-im", type=int, default=1)
    p.add_argument("--csv", help="write CSV here instead of stdout")
    p.add_argument("--strict", action="store_true", help="stop at the first row that is not ok")
    p.add_argument("--workers", type=int, default=1, help="threads for independent rows")
    p.set_defaults(func=cmd_mscan)

    p = sub.add_parser("weyl", parents=[common], help="Weyl double cosets and Omega sets in type A")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", required=True, help="composition of n, e.g. 2,1")
    p.add_argument("--q", required=True, help="composition of n, e.g. 1,2")
    p.add_argument("--query", choices=["cosets", "omega", "omega-semi", "delta", "separation"], default="cosets")
    p.add_argument("--c", type=float, default=1.0, help="threshold for --query separation")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("engine-demo", parents=[common], help="packaged toy families, numeric and exact")
    p.add_argument("--case", choices=sorted(DEMO_CASES), required=True)
    p.set_defaults(func=cmd_engine_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (*NUMERIC_ERRORS, PoleProximityError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, *PRECONDITION_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
