"""
facreg command line

Usage:
    facreg generate --floors 3 --columns 4 --facades 2 --out truth.json
    facreg perturb --truth truth.json --level 3 --seed 7 --out noisy.json
    facreg regularize --input noisy.json --config cfg.toml --output reg.json --report report.json
    facreg evaluate --layout reg.json --truth truth.json --out eval.json
    facreg baseline --input noisy.json --bandwidth-factor 2.0 --out ms.json
    facreg stats --input truth.json noisy.json
    facreg sweep --truth truth.json --levels 1..15 --seeds 10 --out sweep.csv
    facreg export-lp --input noisy.json --out model.lp
    facreg compare --input noisy.json --out compare.json

Exit codes: 0 success, 1 domain error (parse, infeasible, config), 2 usage error.
Diagnostics go to standard error; data goes to files or standard output.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

from dotenv import load_dotenv

from facreg import __version__
from facreg.core.attrspace import build_model_spaces
from facreg.core.config import Config, load_config
from facreg.core.lp_writer import export_lp
from facreg.core.regularizer import (
    build_bip,
    compare_pruning,
    compute_residuals,
    regularize,
    resolve_weights,
)
from facreg.errors import FacregError
from facreg.evaluation.meanshift import DEFAULT_BANDWIDTH_FACTOR, meanshift_baseline
from facreg.evaluation.metrics import category_stats, prf
from facreg.evaluation.noise import NoiseSpec, perturb
from facreg.evaluation.sweep import robustness_sweep
from facreg.io.layout_io import dumps_layout, load_layout, save_layout
from facreg.io.reports import stats_row, write_json, write_stats_csv, write_sweep_csv
from facreg.io.synthetic import SyntheticSpec, generate_synthetic

logger = logging.getLogger("facreg")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
ENV_LOG_LEVEL = "FACREG_LOG"


# ============ Argument helpers ============


def parse_levels(text: str) -> List[int]:
    """'a..b' (inclusive), 'a,b,c' or a single level"""
    try:
        if ".." in text:
            start, end = text.split("..", 1)
            lo, hi = int(start), int(end)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid level range {text!r} (use a..b or a,b,c)")


def parse_kind_mix(text: str) -> Dict[str, float]:
    """'window=0.8,door=0.2'"""
    mix: Dict[str, float] = {}
    try:
        for part in text.split(","):
            key, value = part.split("=", 1)
            mix[key.strip()] = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid kind mix {text!r} (use kind=weight,...)")
    return mix


def _write_text(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        logger.info("Wrote %s", path)


def _config(args: argparse.Namespace) -> Config:
    return load_config(getattr(args, "config", None))


# ============ Commands ============


def cmd_regularize(args: argparse.Namespace) -> int:
    config = _config(args)
    layout = load_layout(args.input)
    regularized, report = regularize(layout, config)
    if args.output:
        save_layout(regularized, args.output)
    else:
        sys.stdout.write(dumps_layout(regularized))
    if args.report:
        write_json(report.to_dict(), args.report)
    for warning in report.warnings:
        logger.warning(warning)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    report = prf(load_layout(args.layout), load_layout(args.truth), strict=args.strict)
    write_json(report.to_dict(), args.out)
    return 0


def cmd_perturb(args: argparse.Namespace) -> int:
    truth = load_layout(args.truth)
    noisy = perturb(truth, NoiseSpec.for_truth(truth, args.level, args.seed))
    _write_text(dumps_layout(noisy), args.out)
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    result = meanshift_baseline(load_layout(args.input), args.bandwidth_factor)
    _write_text(dumps_layout(result), args.out)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    rows = []
    for path in args.input:
        layout = load_layout(path)
        rows.append(stats_row(layout.building_id, len(layout), category_stats(layout)))
    write_stats_csv(rows, args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _config(args)
    rows = robustness_sweep(
        load_layout(args.truth),
        args.levels,
        list(range(args.seeds)),
        config,
        workers=args.workers,
    )
    write_sweep_csv(rows, args.out)
    failed = sum(1 for r in rows if r.failed)
    if failed:
        logger.warning("%d of %d sweep cells failed", failed, len(rows))
    return 0


def cmd_export_lp(args: argparse.Namespace) -> int:
    config = _config(args)
    layout = load_layout(args.input)
    spaces = build_model_spaces(layout, config.prune_radius_factor)
    residuals = compute_residuals(layout, spaces)
    weights = resolve_weights(config.weights, residuals)
    model, _ = build_bip(layout, spaces, weights, config, residuals)
    _write_text(export_lp(model), args.out)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        floors=args.floors,
        columns=args.columns,
        facades=args.facades,
        spacing=args.spacing,
        floor_height=args.floor_height,
        w=args.width,
        h=args.height,
        kind_mix=args.kind_mix,
        seed=args.seed,
        building_id=args.building_id,
    )
    _write_text(dumps_layout(generate_synthetic(spec)), args.out)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    comparison = compare_pruning(load_layout(args.input), _config(args))
    write_json(comparison.to_dict(), args.out)
    return 0


# ============ Parser ============


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facreg", description="Facade layout regularization with binary integer programming"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"Log level (default: ${ENV_LOG_LEVEL}, then the config file, then WARNING)",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace], int], help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(handler=handler)
        return p

    p = command("regularize", cmd_regularize, "Regularize a layout")
    p.add_argument("--input", required=True)
    p.add_argument("--config")
    p.add_argument("--output", help="Regularized layout (default: stdout)")
    p.add_argument("--report", help="Run report JSON")

    p = command("evaluate", cmd_evaluate, "Score a layout against ground truth")
    p.add_argument("--layout", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true", help="Fail on ids without ground truth")

    p = command("perturb", cmd_perturb, "Add Gaussian noise to a layout")
    p.add_argument("--truth", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = command("baseline", cmd_baseline, "Mean-shift baseline")
    p.add_argument("--input", required=True)
    p.add_argument("--bandwidth-factor", type=float, default=DEFAULT_BANDWIDTH_FACTOR)
    p.add_argument("--out")

    p = command("stats", cmd_stats, "Category statistics as CSV")
    p.add_argument("--input", required=True, nargs="+")
    p.add_argument("--out")

    p = command("sweep", cmd_sweep, "Robustness sweep over noise levels and seeds")
    p.add_argument("--truth", required=True)
    p.add_argument("--levels", type=parse_levels, default=parse_levels("1..15"))
    p.add_argument("--seeds", type=int, default=10, help="Seeds 0..N-1")
    p.add_argument("--config")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")

    p = command("export-lp", cmd_export_lp, "Write the regularization BIP in CPLEX LP format")
    p.add_argument("--input", required=True)
    p.add_argument("--config")
    p.add_argument("--out")

    p = command("generate", cmd_generate, "Generate a synthetic facade grid")
    p.add_argument("--floors", type=int, default=3)
    p.add_argument("--columns", type=int, default=4)
    p.add_argument("--facades", type=int, default=1)
    p.add_argument("--spacing", type=float, default=2.0)
    p.add_argument("--floor-height", type=float, default=3.0)
    p.add_argument("--width", type=float, default=1.2)
    p.add_argument("--height", type=float, default=1.5)
    p.add_argument("--kind-mix", type=parse_kind_mix, default={"window": 1.0})
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--building-id", default="synthetic")
    p.add_argument("--out")

    p = command("compare", cmd_compare, "Compare pruned and unpruned models")
    p.add_argument("--input", required=True)
    p.add_argument("--config")
    p.add_argument("--out")

    return parser


def _resolve_level(args: argparse.Namespace) -> str:
    if args.log_level:
        return args.log_level
    env = os.environ.get(ENV_LOG_LEVEL)
    if env:
        return env.upper()
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            return load_config(config_path).solver.log_level.upper()
        except FacregError:
            pass
    return "WARNING"


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    level = _resolve_level(args)
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT, level=getattr(logging, level, logging.WARNING))

    try:
        return args.handler(args)
    except FacregError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return 1
    except Exception as e:
        logger.error("Unexpected error: %s", e)
        logger.debug("Traceback", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
