"""Command-line interface: ``wpdb predict | simulate | sweep | validate``.

Exit status: 0 success, 1 usage or flag error, 2 configuration or degenerate
policy error, 3 I/O error (and 4 when ``validate`` finds a failing property).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .analytic import FormulaVariant, predict_mean_snr, snr_to_db
from .core import SystemParams
from .errors import DegeneratePolicyError, InvalidParameterError, WpdbError
from .montecarlo import estimate_mean_snr, run_sweep
from .policies import make_policy
from .reporting import ConfigError, format_csv, format_json, load_config, resolve_seed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CHECK_FAILED = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bounded(lo: float | None = None, hi: float | None = None, lo_open: bool = False):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
        if lo is not None and (value < lo or (lo_open and value == lo)):
            op = ">" if lo_open else ">="
            raise argparse.ArgumentTypeError(f"must be {op} {lo:g}, got {text!r}")
        if hi is not None and value > hi:
            raise argparse.ArgumentTypeError(f"must be <= {hi:g}, got {text!r}")
        return value

    return parse


def _positive_int(minimum: int = 1):
    def parse(text: str) -> int:
        try:
            value = int(text, 0)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {text!r}")
        return value

    return parse


def _seed(text: str) -> int:
    value = _positive_int(0)(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError(f"must fit in 64 unsigned bits, got {text!r}")
    return value


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", required=True, choices=["ts", "ps"], help="energy-harvesting policy")
    p.add_argument("--fraction", required=True, type=_bounded(0.0, 1.0),
                   help="harvesting fraction (alpha for ts, rho for ps)")
    p.add_argument("--n", required=True, type=_positive_int(), help="number of relays")
    p.add_argument("--eta", required=True, type=_bounded(0.0, 1.0), help="conversion efficiency")
    p.add_argument("--ps-power", required=True, type=_bounded(0.0, lo_open=True),
                   help="source power P_S in linear watts")
    p.add_argument("--sigma-theta-sq", required=True, type=_bounded(0.0),
                   help="phase-error variance in rad^2")
    p.add_argument("--noise-var", type=_bounded(0.0, lo_open=True), default=1.0,
                   help="destination noise variance (default 1)")
    p.add_argument("--db", action="store_true", help="also report dB values")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wpdb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("predict", help="closed-form mean SNR")
    _add_model_flags(p)
    p.add_argument("--variant", choices=[v.value for v in FormulaVariant], default="corrected")

    s = sub.add_parser("simulate", help="Monte-Carlo mean SNR next to the closed form")
    _add_model_flags(s)
    s.add_argument("--trials", type=_positive_int(2), default=100_000)
    s.add_argument("--seed", type=_seed, default=None, help="master seed (overrides $WPDB_SEED)")
    s.add_argument("--workers", type=_positive_int(), default=1)

    w = sub.add_parser("sweep", help="run a configured grid and write CSV or JSON")
    w.add_argument("config", help="path to a JSON run configuration")
    w.add_argument("--output", "-o", help="output path ('-' for stdout); overrides the config")
    w.add_argument("--format", choices=["csv", "json"], help="overrides output_format")
    w.add_argument("--figure", help="also render a figure to this path (png, pdf, svg)")
    w.add_argument("--seed", type=_seed, default=None, help="master seed (overrides $WPDB_SEED)")
    w.add_argument("--workers", type=_positive_int(), default=1)

    v = sub.add_parser("validate", help="run the property battery")
    v.add_argument("--trials", type=_positive_int(2), default=None)
    v.add_argument("--seed", type=_seed, default=None)
    return parser


def _model(args) -> tuple[SystemParams, object]:
    params = SystemParams(args.n, args.ps_power, args.eta, args.sigma_theta_sq, args.noise_var)
    return params, make_policy(args.policy, args.fraction)


def _emit(out, key: str, value) -> None:
    if isinstance(value, float):
        value = repr(float(format(value, ".12g")))
    print(f"{key}={value}", file=out)


def cmd_predict(args, out) -> int:
    params, policy = _model(args)
    pred = predict_mean_snr(params, policy, FormulaVariant.parse(args.variant))
    _emit(out, "policy", args.policy)
    _emit(out, "fraction", args.fraction)
    _emit(out, "n_relays", params.n_relays)
    _emit(out, "variant", pred.variant.value)
    _emit(out, "m_i", pred.m_i)
    _emit(out, "m_q", pred.m_q)
    _emit(out, "var_i", pred.var_i)
    _emit(out, "var_q", pred.var_q)
    _emit(out, "mean_snr", pred.mean_snr)
    if args.db:
        _emit(out, "mean_snr_db", snr_to_db(pred.mean_snr))
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    params, policy = _model(args)
    seed = resolve_seed(0, args.seed, os.environ)
    pred = predict_mean_snr(params, policy, FormulaVariant.CORRECTED)
    mc = estimate_mean_snr(params, policy, args.trials, seed, workers=args.workers)
    _emit(out, "policy", args.policy)
    _emit(out, "fraction", args.fraction)
    _emit(out, "n_relays", params.n_relays)
    _emit(out, "seed", seed)
    _emit(out, "trials", mc.trials)
    _emit(out, "mean", mc.mean)
    _emit(out, "std_error", mc.std_error)
    _emit(out, "ci95_lo", mc.ci95_lo)
    _emit(out, "ci95_hi", mc.ci95_hi)
    _emit(out, "redraws", mc.redraws)
    _emit(out, "pred_corrected", pred.mean_snr)
    _emit(out, "pred_in_ci95", mc.contains(pred.mean_snr))
    if args.db:
        _emit(out, "mean_db", snr_to_db(mc.mean))
        _emit(out, "pred_corrected_db", snr_to_db(pred.mean_snr))
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    fmt = args.format or cfg.output_format
    target = args.output if args.output is not None else cfg.output_path
    figure = args.figure if args.figure is not None else cfg.figure_path
    if target not in (None, "-"):
        parent = Path(target).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise OSError(f"output directory {str(parent)!r} is not writable")

    rows = run_sweep(cfg.spec, workers=args.workers)
    text = format_csv(rows) if fmt == "csv" else format_json(rows, cfg.spec)
    if target in (None, "-"):
        out.write(text)
    else:
        with open(target, "w", newline="") as fh:
            fh.write(text)
    if figure:
        from .plotting import plot_sweep

        plot_sweep(rows, figure, variants=cfg.spec.variants)
    redraws = sum(r.mc.redraws for r in rows)
    print(f"wpdb: {len(rows)} rows, seed={cfg.spec.master_seed}, redraws={redraws}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    from .validate import DEFAULT_SEED, DEFAULT_TRIALS, run_battery

    seed = resolve_seed(DEFAULT_SEED, args.seed, os.environ)
    checks = run_battery(args.trials or DEFAULT_TRIALS, seed)
    for c in checks:
        print(c.line(), file=out)
    failed = [c for c in checks if not c.informational and not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed", file=out)
    return EXIT_OK if not failed else EXIT_CHECK_FAILED


_COMMANDS = {
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except ConfigError as exc:
        print(f"wpdb: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegeneratePolicyError as exc:
        print(f"wpdb: degenerate policy: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidParameterError as exc:
        print(f"wpdb: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"wpdb: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except WpdbError as exc:
        print(f"wpdb: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
