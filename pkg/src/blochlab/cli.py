"""Command-line front end: ``blochlab <subcommand> ...``.

Exit codes: 0 success, 1 verification or numerical failure, 2 bad arguments
or specs, 3 symbol refused by self-map validation.
"""

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

from . import acceptance
from . import monomials as mono
from .errors import BlochLabError, EvaluationError, SelfMapRefused
from .operator import (
    Policy,
    _check_symbol,
    annuli_diagnostic,
    classify,
    default_threads,
    essential_norm_band,
    quotient_sequence,
    run_metadata,
)
from .seminorm import GridConfig
from .symbols import parse_symbol_spec
from .weights import equivalence_constants, parse_weight_spec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3

_DENOM = {"exact": "exact_norm", "log": "log_j_plus_1"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits on its own; raise instead so run() can be called in-process
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


def _j_list(text):
    try:
        js = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --j-list {text!r}") from None
    if not js or min(js) < 1:
        raise argparse.ArgumentTypeError("--j-list needs positive integers")
    return js


def _add_output(p, default="csv"):
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--out", metavar="PATH", help="write here instead of standard output")
    p.add_argument("--stamp", action="store_true", help="add a UTC timestamp to the metadata")


def _add_grid(p):
    d = GridConfig()
    g = p.add_argument_group("grid")
    g.add_argument("--n-radii", type=int, default=d.n_radii)
    g.add_argument("--n-angles", type=int, default=d.n_angles)
    g.add_argument("--r-max", type=float, default=d.r_max)
    g.add_argument("--refine-rounds", type=int, default=d.refine_rounds)
    g.add_argument("--rel-tol", type=float, default=d.rel_tol)


def _add_series(p):
    p.add_argument("--symbol", required=True)
    p.add_argument("--weight", default="vlog")
    p.add_argument("--j-max", type=_positive_int, required=True)
    p.add_argument("--denominator", choices=tuple(_DENOM), default="exact")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker threads (default: $BLOCHLAB_THREADS or CPU count)")
    p.add_argument("--force", action="store_true",
                   help="run even if the symbol fails self-map validation")
    _add_grid(p)


def _add_policy(p):
    d = Policy()
    g = p.add_argument_group("classification policy")
    g.add_argument("--stabilization-slack", type=float, default=d.stabilization_slack)
    g.add_argument("--compact-threshold", type=float, default=d.compact_threshold)


def build_parser():
    ap = _Parser(prog="blochlab", description="Weighted Bloch norms and composition operators.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("monomials", help="exact log-Bloch norms of z**j")
    p.add_argument("--j-max", type=_positive_int)
    p.add_argument("--j-list", type=_j_list)
    _add_output(p)

    p = sub.add_parser("quotients", help="quotient sequence q_j")
    _add_series(p)
    _add_output(p)

    p = sub.add_parser("classify", help="boundedness and compactness evidence")
    _add_series(p)
    _add_policy(p)
    _add_output(p, "json")

    p = sub.add_parser("essnorm", help="essential-norm band")
    _add_series(p)
    _add_policy(p)
    p.add_argument("--tail-fraction", type=float, default=0.25)
    _add_output(p, "json")

    p = sub.add_parser("weight-equiv", help="equivalence constants of two weights")
    p.add_argument("--w1", required=True)
    p.add_argument("--w2", required=True)
    p.add_argument("--grid", type=_positive_int, default=10_000)
    _add_output(p, "json")

    p = sub.add_parser("annuli", help="histogram of |phi| over the bands [r_{j-1}, r_j)")
    p.add_argument("--symbol", required=True)
    p.add_argument("--j-max", type=_positive_int, required=True)
    p.add_argument("--samples", type=_positive_int, default=65536)
    p.add_argument("--force", action="store_true")
    _add_output(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--fast", action="store_true", help="reduced index ranges")
    p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("constants", help="closed-form constants")
    _add_output(p)
    return ap


# --- serialization -----------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: NaN -> null, infinities -> strings, complex -> [re, im]."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(payload):
    return json.dumps(_clean(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _key_value_csv(d):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in d.items():
        w.writerow([k, f"{v:.17g}" if isinstance(v, float) else v])
    return buf.getvalue()


def _emit(args, csv_text, result, config):
    """Write the result; CSV stays a bare table and its config goes to a sidecar."""
    meta = run_metadata(stamp=getattr(args, "stamp", False))
    if args.format == "json":
        text = _dump_json({"result": result, "config": config, "meta": meta})
    else:
        text = csv_text
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if args.format == "csv":
            with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
                fh.write(_dump_json({"config": config, "meta": meta}))
    else:
        sys.stdout.write(text)


# --- subcommands ---------------------------------------------------------------


def _grid(args):
    return GridConfig(
        n_radii=args.n_radii,
        n_angles=args.n_angles,
        r_max=args.r_max,
        refine_rounds=args.refine_rounds,
        rel_tol=args.rel_tol,
    )


def _series(args):
    phi = parse_symbol_spec(args.symbol)
    mu = parse_weight_spec(args.weight)
    cfg = _grid(args)
    threads = args.threads or default_threads()
    series = quotient_sequence(phi, mu, args.j_max, cfg, denominator=_DENOM[args.denominator],
                               force=args.force, threads=threads)
    config = {
        "command": args.command,
        "symbol": phi.spec,
        "weight": mu.spec,
        "j_max": args.j_max,
        "denominator": series.denominator,
        "force": args.force,
        "grid": cfg.to_dict(),
    }
    return series, config


def _policy(args):
    return Policy(stabilization_slack=args.stabilization_slack,
                  compact_threshold=args.compact_threshold)


def cmd_monomials(args):
    if args.j_list is None and args.j_max is None:
        raise _UsageError("monomials: give --j-max or --j-list")
    js = args.j_list if args.j_list is not None else range(1, args.j_max + 1)
    records = mono.norm_table(js)
    rows = [{**dataclasses.asdict(r), "t_j": r.t_j} for r in records]
    config = {"command": "monomials", "js": [r.j for r in records]}
    _emit(args, mono.norm_table_csv(records), rows, config)
    return EXIT_OK


def cmd_quotients(args):
    series, config = _series(args)
    _emit(args, series.to_csv(), series.to_dict(), config)
    return EXIT_OK


def cmd_classify(args):
    series, config = _series(args)
    policy = _policy(args)
    c = classify(series, policy)
    config["policy"] = dataclasses.asdict(policy)
    _emit(args, _key_value_csv(c.to_dict()), c.to_dict(), config)
    return EXIT_OK


def cmd_essnorm(args):
    series, config = _series(args)
    policy = _policy(args)
    c = classify(series, policy)
    band = essential_norm_band(series, args.tail_fraction, classification=c)
    result = {**band.to_dict(), "ratio": band.ratio}
    config.update(policy=dataclasses.asdict(policy), tail_fraction=args.tail_fraction)
    _emit(args, _key_value_csv(result), result, config)
    return EXIT_OK


def cmd_weight_equiv(args):
    w1, w2 = parse_weight_spec(args.w1), parse_weight_spec(args.w2)
    rep = equivalence_constants(w1, w2, args.grid)
    result = dataclasses.asdict(rep)
    config = {"command": "weight-equiv", "w1": w1.spec, "w2": w2.spec, "grid": args.grid}
    _emit(args, _key_value_csv(result), result, config)
    return EXIT_OK


def cmd_annuli(args):
    phi = parse_symbol_spec(args.symbol)
    _check_symbol(phi, args.force)
    hist = annuli_diagnostic(phi, args.j_max, args.samples)
    config = {"command": "annuli", "symbol": phi.spec, "j_max": args.j_max,
              "samples": args.samples}
    _emit(args, hist.to_csv(), hist.to_dict(), config)
    return EXIT_OK


def cmd_verify(args):
    lines = []

    def echo(line):
        lines.append(line)
        print(line, flush=True)

    results = acceptance.run_all(fast=args.fast, echo=echo)
    n_ok = sum(r.passed for r in results)
    summary = f"{n_ok}/{len(results)} checks passed"
    echo(summary)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK if n_ok == len(results) else EXIT_FAIL


def cmd_constants(args):
    c = dataclasses.asdict(mono.CONSTANTS)
    _emit(args, _key_value_csv(c), c, {"command": "constants"})
    return EXIT_OK


_COMMANDS = {
    "monomials": cmd_monomials,
    "quotients": cmd_quotients,
    "classify": cmd_classify,
    "essnorm": cmd_essnorm,
    "weight-equiv": cmd_weight_equiv,
    "annuli": cmd_annuli,
    "verify": cmd_verify,
    "constants": cmd_constants,
}


def run(argv=None):
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SelfMapRefused as exc:
        print(f"blochlab: refused: {exc} (CLI: use --force)", file=sys.stderr)
        return EXIT_REFUSED
    except EvaluationError as exc:
        print(f"blochlab: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (BlochLabError, ValueError) as exc:
        print(f"blochlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
