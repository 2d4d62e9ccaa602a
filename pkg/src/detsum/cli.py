"""Command-line entry point: ``detsum <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DetsumError, InsufficientRange, OutOfRegime, RadiusTooLarge

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``a:b:gN`` (N geometric points), ``a:b:step`` (arithmetic) or ``x,y,z``."""
    text = text.strip()
    try:
        if ":" in text:
            a, b, c = text.split(":")
            lo, hi = float(a), float(b)
            if hi < lo:
                raise ValueError
            if c.startswith("g"):
                n = int(c[1:])
                if n < 1 or (n > 1 and lo <= 0):
                    raise ValueError
                return [float(x) for x in np.geomspace(lo, hi, n)] if n > 1 else [lo]
            step = float(c)
            if step <= 0:
                raise ValueError
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return [lo + i * step for i in range(n)]
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use start:stop:gN, start:stop:step or a,b,c") from None


def _lattice(args):
    from .constructions import CLI_NAMES, builtin, lattice_from_algebra_block
    from .lattice import lattice_from_json
    from .manifest import strip_header

    if getattr(args, "infile", None):
        return lattice_from_json(strip_header(Path(args.infile).read_text()))
    if getattr(args, "a", None) is not None:
        return lattice_from_algebra_block({"a": args.a, "gamma": args.gamma, "center": args.center})
    if args.code not in CLI_NAMES:
        raise UsageError(f"unknown code {args.code!r}; choose from {', '.join(CLI_NAMES)}")
    return builtin(args.code)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- commands: each returns (files, stdout_text, seed, exit_code) -----------


def cmd_construct(args):
    from .lattice import lattice_to_json

    L = _lattice(args)
    if args.format == "csv":
        body = _csv([f"g{j}" for j in range(L.k)], [[f"{v:.12g}" for v in row] for row in L.gram])
    else:
        d = lattice_to_json(L)
        d["covolume"] = L.covolume
        d["exact_det"] = L.exact_det
        body = _json(d)
    return body, None, EXIT_OK


def cmd_enumerate(args):
    from .enumeration import shell_counts

    L = _lattice(args)
    tab = shell_counts(L, parse_grid(args.radii), threads=args.threads)
    if args.format == "json":
        body = _json({"lattice": L.tag, "radii": list(tab.radii), "counts": list(tab.counts)})
    else:
        body = tab.to_csv()
    return body, None, EXIT_OK


def cmd_sum(args):
    from .sums import inverse_det_sum

    L = _lattice(args)
    tab = inverse_det_sum(L, args.m, parse_grid(args.radii), zero_policy=args.zero_policy, threads=args.threads)
    if args.format == "json":
        body = _json(
            {
                "lattice": L.tag,
                "m": args.m,
                "skipped_zero": tab.skipped_zero,
                "rows": [r.__dict__ for r in tab.rows],
            }
        )
    else:
        body = tab.to_csv()
    return body, None, EXIT_OK


def _read_table(path) -> dict:
    from .manifest import strip_header

    rows = list(csv.DictReader(io.StringIO(strip_header(Path(path).read_text()))))
    if not rows:
        raise UsageError(f"{path} has no data rows")
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def cmd_fit(args):
    from .asymptotics import fit_growth

    tab = _read_table(args.infile)
    if args.col not in tab or "M" not in tab:
        raise UsageError(f"table needs columns M and {args.col}; has {sorted(tab)}")
    window = None
    if args.window:
        lo, hi = (float(x) for x in args.window.split(":"))
        window = (lo, hi)
    fit = fit_growth(tab["M"], tab[args.col], window=window, trim=args.trim)
    d = fit.to_dict()
    d["column"] = args.col
    if args.format == "csv":
        body = _csv(list(d), [list(d.values())])
    else:
        body = _json(d)
    return body, None, EXIT_OK


def cmd_predict(args):
    from .asymptotics import dmt_sum_lower_exponent, predicted_exponent

    L = _lattice(args)
    pred = predicted_exponent(L, args.nr)
    d = pred.to_dict()
    d["lower_bound"] = float(dmt_sum_lower_exponent(L.n, L.k, args.nr))
    d["code"] = L.tag
    d["n_r"] = args.nr
    return _json(d), None, EXIT_OK


def cmd_dmt(args):
    from .asymptotics import code_dmt_segment, dmt_sum_lower_exponent, optimal_dmt

    d = {
        "n": args.n,
        "k": args.k,
        "n_r": args.nr,
        "lower_exponent": float(dmt_sum_lower_exponent(args.n, args.k, args.nr)),
        "optimal": optimal_dmt(args.n, args.nr).to_dict(),
    }
    if args.code:
        d["segment"] = code_dmt_segment(_lattice(args), args.nr).to_dict()
    if args.format == "csv":
        body = _csv(["r", "d"], [[r, v] for r, v in d["optimal"]["vertices"]])
    else:
        body = _json(d)
    return body, None, EXIT_OK


def cmd_lie(args):
    from .lie_volume import build_root_data, volume_report

    rep = volume_report(build_root_data(args.family, args.n))
    rows = [[j + 1, str(tp), str(lam)] for j, (tp, lam) in enumerate(zip(rep.two_psi, rep.lambda_values))]
    if args.format == "csv":
        body = _csv(["j", "two_psi", "lambda1"], rows)
    else:
        body = _json(
            {
                "family": args.family,
                "n": args.n,
                "T": int(rep.T) if rep.T.denominator == 1 else str(rep.T),
                "argmin": rep.argmin,
                "table": [{"j": r[0], "two_psi": r[1], "lambda1": r[2]} for r in rows],
            }
        )
    return body, None, EXIT_OK


def cmd_simulate(args):
    from .channel import SimConfig, bler_csv, qam_codebook, simulate

    L = _lattice(args)
    cb = qam_codebook(L)
    cfg = SimConfig(L.n, args.nr, L.n, tuple(parse_grid(args.snr)), args.blocks, args.seed,
                    threads=args.threads)
    rows = simulate(cb, cfg)
    if args.format == "json":
        body = _json(
            {
                "code": L.tag,
                "n_r": args.nr,
                "seed": args.seed,
                "rows": [
                    {"snr_db": r.snr_db, "blocks": r.blocks, "errors": r.block_errors, "bler": r.bler, "ci95": r.ci95}
                    for r in rows
                ],
            }
        )
    else:
        body = bler_csv(rows)
    return body, args.seed, EXIT_OK


def build_report(L, m: float, n_r: int, radii, threads: int = 1) -> tuple[dict, str]:
    """Verdict document and det-sum CSV for one code."""
    from . import asymptotics as A
    from .lie_volume import unit_growth_prediction
    from .sums import inverse_det_sum

    tab = inverse_det_sum(L, m, radii, threads=threads)
    reg = A.regime_of(L)
    try:
        pred = A.predicted_exponent(L, n_r)
    except OutOfRegime:
        pred = None
    try:
        fit = A.fit_growth(tab.radii, tab.column("sum"))
    except InsufficientRange:
        fit = None
    measured = None if fit is None else fit.slope
    out = {
        "code": L.tag,
        "m": m,
        "n_r": n_r,
        "radii": list(map(float, tab.radii)),
        "measured": measured,
        "predicted": None if pred is None else float(pred.exponent),
        "prediction": None if pred is None else ("polylog/constant" if pred.polylog else f"M^{pred.exponent}"),
        "prediction_tag": None if pred is None else pred.tag,
        "tolerance": None if pred is None else A.tolerance_for(pred),
        "lower_bound": float(A.dmt_sum_lower_exponent(L.n, L.k, n_r)),
        "regime": reg.label,
        "fit": None if fit is None else fit.to_dict(),
        "heuristic": (m % 2 != 0) or m != 2 * n_r,
        "verdict": A.verdict(measured, pred),
    }
    if reg.kind != A.NUMBER_FIELD:
        units = tab.column("unit_count")
        try:
            ufit = A.fit_growth(tab.radii, units).slope
        except InsufficientRange:
            ufit = None
        out["units"] = {
            "counts": [int(u) for u in units],
            "measured_slope": ufit,
            "predicted": float(unit_growth_prediction(reg.kind, reg.n)),
        }
    return out, tab.to_csv()


def cmd_report(args):
    L = _lattice(args)
    m = float(args.m) if args.m is not None else float(2 * args.nr)
    doc, table = build_report(L, m, args.nr, parse_grid(args.radii), args.threads)
    files = {}
    if args.out_dir:
        files[str(Path(args.out_dir) / "detsum.csv")] = table
        files[str(Path(args.out_dir) / "report.json")] = _json(doc)
    code = EXIT_MISMATCH if doc["verdict"] == "MISMATCH" else EXIT_OK
    return _json(doc), files, code


# --- parser -----------------------------------------------------------------


def _add_lattice_args(p, required=True):
    p.add_argument("--code", default=None, help="built-in code name")
    p.add_argument("--in", dest="infile", default=None, help="lattice descriptor JSON")
    p.add_argument("--a", type=int, default=None, help="radicand of E = F(sqrt a) for a user algebra")
    p.add_argument("--gamma", type=int, default=None)
    p.add_argument("--center", choices=("Q", "Qi"), default="Q")


def build_parser() -> argparse.ArgumentParser:
    # shared options are accepted before or after the subcommand; each parser
    # gets its own copy since parents share action objects
    def common():
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (default 1)")
        c.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
        c.add_argument("--out", default=argparse.SUPPRESS, help="output file (stdout when omitted)")
        return c

    ap = argparse.ArgumentParser(prog="detsum", description=__doc__, parents=[common()])
    ap.add_argument("--version", action="version", version=f"detsum {__version__}")
    ap.set_defaults(threads=1, format=None, out=None)
    _sub = ap.add_subparsers(dest="command", required=True)

    class _Sub:
        def add_parser(self, *a, **kw):
            return _sub.add_parser(*a, parents=[common()], **kw)

    sub = _Sub()

    p = sub.add_parser("construct", help="build a lattice and print its descriptor")
    _add_lattice_args(p)
    p.set_defaults(func=cmd_construct, default_format="json")

    p = sub.add_parser("enumerate", help="shell counts |L(M)|")
    _add_lattice_args(p)
    p.add_argument("--radii", required=True)
    p.set_defaults(func=cmd_enumerate, default_format="csv")

    p = sub.add_parser("sum", help="inverse determinant sums")
    _add_lattice_args(p)
    p.add_argument("-m", type=float, required=True)
    p.add_argument("--radii", required=True)
    p.add_argument("--zero-policy", choices=("reject", "skip"), default="reject")
    p.set_defaults(func=cmd_sum, default_format="csv")

    p = sub.add_parser("fit", help="log-log growth fit of a table column")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--col", required=True)
    p.add_argument("--window", default=None, help="lo:hi radius window")
    p.add_argument("--trim", type=float, default=0.25)
    p.set_defaults(func=cmd_fit, default_format="json")

    p = sub.add_parser("predict", help="predicted growth exponent")
    _add_lattice_args(p)
    p.add_argument("--nr", type=int, required=True)
    p.set_defaults(func=cmd_predict, default_format="json")

    p = sub.add_parser("dmt", help="DMT lower exponent and curves")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nr", type=int, required=True)
    p.add_argument("--code", default=None)
    p.set_defaults(func=cmd_dmt, default_format="json", infile=None, a=None)

    p = sub.add_parser("lie", help="volume growth exponent from root data")
    p.add_argument("--family", choices=("complex", "real", "quaternion"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_lie, default_format="json")

    p = sub.add_parser("simulate", help="Monte Carlo block error rates")
    _add_lattice_args(p)
    p.add_argument("--nr", type=int, default=1)
    p.add_argument("--snr", required=True, help="SNR grid in dB")
    p.add_argument("--blocks", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate, default_format="csv")

    p = sub.add_parser("report", help="det-sum table, fits, predictions and verdict")
    _add_lattice_args(p)
    p.add_argument("-m", type=float, default=None, help="sum exponent (default 2*nr)")
    p.add_argument("--nr", type=int, default=1)
    p.add_argument("--radii", default="8:96:g12")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_report, default_format="json")
    return ap


def main(argv=None) -> int:
    from .manifest import make_manifest, write_outputs

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    if args.format is None:
        args.format = args.default_format
    if getattr(args, "code", None) is None and getattr(args, "infile", None) is None and getattr(args, "a", None) is None:
        if args.command not in ("fit", "dmt", "lie"):
            parser.error("one of --code, --in or --a is required")
    if getattr(args, "a", None) is not None and getattr(args, "gamma", None) is None:
        parser.error("--a requires --gamma")
    t0 = time.perf_counter()
    try:
        body, extra, code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except RadiusTooLarge as exc:
        print(f"detsum: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DetsumError, ValueError) as exc:
        print(f"detsum: {exc}", file=sys.stderr)
        return EXIT_ERROR
    files = {}
    seed = None
    if isinstance(extra, dict):
        files.update(extra)
    elif extra is not None:
        seed = extra
    if args.out:
        files[args.out] = body
    else:
        sys.stdout.write(body)
    if files:
        config = {k: v for k, v in vars(args).items() if k not in ("func",)}
        man = make_manifest(["detsum", *argv], config, seed, time.perf_counter() - t0, sorted(files))
        write_outputs(files, man)
    return code


if __name__ == "__main__":
    sys.exit(main())
