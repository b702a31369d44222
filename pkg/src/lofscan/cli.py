"""Command-line entry point: ``lofscan run`` and ``lofscan synth``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from lofscan.errors import LofscanError
from lofscan.log_model import CommandClass, FilterConfig
from lofscan.pipeline import EXIT_CONFIG, EXIT_OK, PipelineConfig, run
from lofscan.synthgen import ScenarioConfig, synth_to_files

logger = logging.getLogger("lofscan")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _jobs(text: str) -> int:
    value = int(text)
    if value < 1 and value != -1:
        raise argparse.ArgumentTypeError("--jobs takes a positive integer or -1 for all cores")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser = argparse.ArgumentParser(prog="lofscan", description="Windowed LOF anomaly detection for event logs.")
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="score a log and write per-chunk reports")
    r.add_argument("--input", required=True, type=Path, help="five-column CSV log")
    r.add_argument("--classes", type=Path, help="command,class CSV (globs allowed in the command column)")
    r.add_argument("--out", required=True, type=Path, help="output directory")
    r.add_argument("--chunk-size", type=_positive, default=100_000)
    r.add_argument("--window", type=_positive, default=11)
    r.add_argument("--k", type=_positive, default=20)
    r.add_argument("--top", type=_positive, default=5, help="outlier windows reported per chunk")
    r.add_argument(
        "--exclude-class", action="append", default=None, metavar="CLASS",
        help="command class to drop (repeatable; default: other)",
    )
    r.add_argument("--exclude-pattern", action="append", default=[], metavar="GLOB",
                   help="drop commands matching this glob (repeatable)")
    r.add_argument("--suppress-overlap", action="store_true",
                   help="never report two windows that share entries")
    r.add_argument("--dump-vectors", action="store_true", help="also write normalized entry and window vectors")
    r.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")
    r.add_argument("--jobs", type=_jobs, default=1, help="worker threads (-1 for all cores)")

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic log with ground truth")
    s.add_argument("--scenario", type=Path, help="scenario TOML (default: built-in 24 h plant)")
    s.add_argument("--seed", type=int, help="overrides the scenario seed")
    s.add_argument("--out", required=True, type=Path, help="log CSV to write")
    s.add_argument("--truth", required=True, type=Path, help="ground-truth JSON to write")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    classes = args.exclude_class if args.exclude_class is not None else ["other"]
    flt = FilterConfig(
        frozenset(CommandClass.parse(c) for c in classes),
        tuple(args.exclude_pattern),
    )
    cfg = PipelineConfig(
        input_path=args.input,
        out_dir=args.out,
        classes_path=args.classes,
        chunk_size=args.chunk_size,
        window=args.window,
        k=args.k,
        top_n=args.top,
        filter=flt,
        suppress_overlap=args.suppress_overlap,
        dump_vectors=args.dump_vectors,
        lenient=args.lenient,
        n_jobs=args.jobs,
    )
    summary = run(cfg)
    logger.info(
        "chunks processed=%d skipped=%d failed=%d",
        len(summary.processed), len(summary.skipped), len(summary.failed),
    )
    return summary.exit_code


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = ScenarioConfig.from_toml(args.scenario) if args.scenario else ScenarioConfig()
    if args.seed is not None:
        cfg = ScenarioConfig(**{**cfg.__dict__, "seed": args.seed})
    n_entries, n_truth = synth_to_files(cfg, args.out, args.truth)
    logger.info("wrote %d entries and %d truth ranges", n_entries, n_truth)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_synth(args)
    except (LofscanError, ValueError, OSError) as exc:
        print(f"lofscan: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
