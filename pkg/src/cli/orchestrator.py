"""
Separability-probability command-line orchestrator

Single entry point for estimation runs and reference verification.

Usage:
    python -m src.cli estimate --measure hs --alpha0 0.5 --points 20000000
    python -m src.cli estimate --measure bures --points 4000000 --paired
    python -m src.cli verify --all
    python -m src.cli abs-sep --induced-sweep 4
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from tqdm import tqdm

from src.config.config_main import estimation_config, logging_config, sampling_config
from src.estimation.estimator import (
    RunSummary, TruncationPolicy, bin_estimates, load_summary_json,
    volume_ratio, write_bins_csv, write_summary_json, write_trace_csv,
)
from src.estimation.runner import EstimationRunner, RunResult
from src.errors import DomainError
from src.quantum.measures import MeasureKind, STUDIED_KINDS, induced
from src.reference.integrals import abs_sep_quadrature
from src.reference.special import QuadratureError
from src.reference.targets import TARGETS, VerificationRow, evaluate, resolve

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_OUTPUT = 3
EXIT_QUADRATURE = 4


@dataclass
class RunConfig:
    command: str
    measure: MeasureKind
    alpha0: float
    points: int
    block: int
    chunk: int
    policy: TruncationPolicy
    bins: int
    workers: int
    offset: int
    subsystem: str
    output: Path
    paired: bool = False

    def validate(self) -> None:
        if self.points < self.block:
            raise DomainError(f"--points ({self.points}) must be at least --block ({self.block})")
        if self.bins < 1:
            raise DomainError(f"--bins must be >= 1, got {self.bins}")
        if self.workers < 1:
            raise DomainError(f"--workers must be >= 1, got {self.workers}")
        if not 0.0 <= self.alpha0 <= 1.0:
            raise DomainError(f"--alpha0 must lie in [0, 1], got {self.alpha0}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        config = cls(
            command=args.command,
            measure=MeasureKind.parse(args.measure),
            alpha0=args.alpha0,
            points=args.points,
            block=args.block,
            chunk=args.chunk,
            policy=TruncationPolicy.parse(args.policy),
            bins=args.bins,
            workers=args.workers,
            offset=args.offset,
            subsystem=args.subsystem,
            output=Path(args.output),
            paired=getattr(args, "paired", False),
        )
        config.validate()
        return config


def _banner(title: str, char: str = "=") -> None:
    print(f"\n{char*70}")
    print(title)
    print(f"{char*70}\n")


def _prepare_output(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    if not os.access(directory, os.W_OK):
        raise PermissionError(f"output directory {directory} is not writable")


def _stem(config: RunConfig, alpha0: float) -> str:
    return f"{config.measure.label.replace(':', '-')}_a{alpha0:g}"


def _run_one(config: RunConfig, alpha0: float) -> RunResult:
    runner = EstimationRunner(
        config.measure,
        alpha0=alpha0,
        points=config.points,
        block=config.block,
        chunk=config.chunk,
        policy=config.policy,
        bins=config.bins,
        workers=config.workers,
        offset=config.offset,
        subsystem=config.subsystem,
    )
    return runner.run()


def _print_summary(summary: RunSummary) -> None:
    print(f"  measure:            {summary.measure}")
    print(f"  alpha0:             {summary.alpha0:g}")
    print(f"  points:             {summary.points:,}")
    print(f"  policy:             {summary.policy}")
    print(f"  separability:       {summary.sep_estimate:.6f}")
    print(f"  absolute:           {summary.abs_sep_estimate:.6g}")
    print(f"  ESS:                {summary.ess:.4g} ({summary.ess / summary.points:.3g} of N)")
    print(f"  discards/rejected:  {summary.discards:,} / {summary.rejections:,}")
    print(f"  log mean weight:    {summary.log_mean_weight:.6f}")
    print(f"  wall time:          {summary.wall_time:.1f}s")


def run_estimate(config: RunConfig) -> int:
    """Estimate, then write one trace CSV and one JSON summary per alpha0."""
    _banner(f"# SEPARABILITY ESTIMATE - {config.measure}\n# Started at: "
            f"{datetime.now().strftime('%Y-%m-%d %H:%M:%S')}", "#")

    try:
        _prepare_output(config.output)
    except OSError as e:
        logger.error(f"Cannot write to {config.output}: {e}")
        return EXIT_OUTPUT

    alphas = estimation_config.paired_alpha0 if config.paired else (config.alpha0,)
    results = []
    for alpha0 in alphas:
        result = _run_one(config, alpha0)
        results.append(result)
        stem = _stem(config, alpha0)
        try:
            trace_path = write_trace_csv(result.state.trace, config.output / f"{stem}_trace.csv")
            summary_path = write_summary_json(result.summary, config.output / f"{stem}_summary.json")
        except OSError as e:
            logger.error(f"Cannot write results for alpha0={alpha0}: {e}")
            return EXIT_OUTPUT

        _banner(f"RESULT alpha0={alpha0:g}")
        _print_summary(result.summary)
        print(f"\n  trace:   {trace_path}")
        print(f"  summary: {summary_path}")

    if config.paired:
        mean = sum(r.summary.sep_estimate for r in results) / len(results)
        print(f"\nPaired mean separability estimate: {mean:.6f}")
    return EXIT_OK


def run_bloch_bins(config: RunConfig) -> int:
    """Estimate and report the per-Bloch-radius separability profile."""
    try:
        _prepare_output(config.output)
    except OSError as e:
        logger.error(f"Cannot write to {config.output}: {e}")
        return EXIT_OUTPUT

    result = _run_one(config, config.alpha0)
    bins = bin_estimates(result.state)
    path = config.output / f"{_stem(config, config.alpha0)}_bins_{config.subsystem}.csv"
    try:
        write_bins_csv(bins, path)
    except OSError as e:
        logger.error(f"Cannot write {path}: {e}")
        return EXIT_OUTPUT

    _banner(f"BLOCH PROFILE - {config.measure}, subsystem {config.subsystem}")
    print(f"  {'radius':>13}  {'count':>10}  {'sep':>10}  {'abs':>10}")
    for b in bins:
        sep = "-" if b.sep_estimate is None else f"{b.sep_estimate:.6f}"
        abs_sep = "-" if b.abs_sep_estimate is None else f"{b.abs_sep_estimate:.3g}"
        print(f"  [{b.lower:.2f}, {b.upper:.2f})  {b.count:>10,}  {sep:>10}  {abs_sep:>10}")
    print(f"\n  global: {result.summary.sep_estimate:.6f}")
    print(f"  profile: {path}")
    return EXIT_OK


def format_rows(rows: List[VerificationRow], fmt: str = "text") -> str:
    def num(value: Optional[float], spec: str = ".10g") -> str:
        if value is None:
            return ""
        if value == float("inf"):
            return "infinite"
        return format(value, spec)

    if fmt == "csv":
        lines = ["quantity,computed,expected,abs_deviation,rel_deviation,status"]
        for r in rows:
            lines.append(
                f"{r.quantity},{num(r.computed, '.15g')},{num(r.expected, '.15g')},"
                f"{num(r.abs_deviation, '.3e')},{num(r.rel_deviation, '.3e')},{r.status}"
            )
        return "\n".join(lines)

    lines = [f"{'quantity':<28} {'computed':>18} {'expected':>18} {'abs dev':>10} {'rel dev':>10}  status"]
    for r in rows:
        lines.append(
            f"{r.quantity:<28} {num(r.computed):>18} {num(r.expected):>18} "
            f"{num(r.abs_deviation, '.2e'):>10} {num(r.rel_deviation, '.2e'):>10}  {r.status}"
        )
    return "\n".join(lines)


def run_verify(quantities: Optional[List[str]] = None, fmt: str = "text") -> int:
    """Evaluate reference targets; exit 0 only if every checked row is in tolerance."""
    try:
        targets = resolve(quantities) if quantities else list(TARGETS.values())
    except KeyError as e:
        logger.error(str(e))
        return EXIT_USAGE

    rows = []
    for target in tqdm(targets, desc="Verifying", unit="quantity", disable=len(targets) < 2):
        try:
            rows.append(evaluate(target))
        except QuadratureError as e:
            logger.error(f"Quadrature did not converge: {e}")
            print(format_rows(rows, fmt))
            print(f"\nFAILED: {target.name} did not converge")
            return EXIT_QUADRATURE

    print(format_rows(rows, fmt))
    failed = [r.quantity for r in rows if r.passed is False]
    if failed:
        print(f"\n{len(failed)} check(s) out of tolerance: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    logger.info(f"All {len(rows)} quantities verified")
    return EXIT_OK


def run_abs_sep(kinds: List[MeasureKind]) -> int:
    rows = []
    for kind in tqdm(kinds, desc="Integrating", unit="measure", disable=len(kinds) < 2):
        try:
            result = abs_sep_quadrature(kind)
        except QuadratureError as e:
            logger.error(f"Quadrature did not converge: {e}")
            print(f"\nFAILED: {kind} did not converge")
            return EXIT_QUADRATURE
        rows.append((kind, "divergent" if result.divergent else f"{result.ratio:.9g}"))

    _banner("ABSOLUTE SEPARABILITY (eigenvalue-simplex quadrature)")
    print(f"  {'measure':<20} {'probability':>16}")
    for kind, value in rows:
        print(f"  {kind.label:<20} {value:>16}")
    return EXIT_OK


def run_volume_ratio(summary_path: str, reference_path: str) -> int:
    try:
        summary = load_summary_json(summary_path)
        reference = load_summary_json(reference_path)
    except (OSError, ValueError, TypeError) as e:
        logger.error(f"Cannot read run summaries: {e}")
        return EXIT_USAGE
    ratio = volume_ratio(summary, reference)
    print(f"Volume {summary.measure} / {reference.measure}: {ratio:.6g}")
    return EXIT_OK


def _add_run_arguments(parser: argparse.ArgumentParser, default_measure: str = None) -> None:
    parser.add_argument('--measure', type=str, default=default_measure, required=default_measure is None,
                        help="Measure: hs, bures, maximal, kubo-mori, geometric, wigner-yanase, "
                             "log-geometric, arith-minmax, morozova-chentsov, identric, induced:<k>")
    parser.add_argument('--alpha0', type=float, default=sampling_config.alpha0,
                        help='Sequence offset in [0, 1] (default: SEPPROB_ALPHA0 or 0.5)')
    parser.add_argument('--points', type=int, default=estimation_config.block_size,
                        help='Number of points N (must be >= --block)')
    parser.add_argument('--block', type=int, default=estimation_config.block_size,
                        help='Points per trace row (default: 2,000,000)')
    parser.add_argument('--chunk', type=int, default=estimation_config.chunk_size,
                        help='Points per work unit (default: 65,536)')
    parser.add_argument('--policy', type=str, default='none',
                        help="Truncation policy: none, weight-cap:<log cap>, eigen-floor:<delta>")
    parser.add_argument('--bins', type=int, default=estimation_config.bins,
                        help='Bloch-radius bins on [0, 1]')
    parser.add_argument('--workers', type=int, default=estimation_config.workers,
                        help='Worker processes (default: SEPPROB_WORKERS or 1)')
    parser.add_argument('--offset', type=int, default=sampling_config.index_offset,
                        help='Index of the first point')
    parser.add_argument('--subsystem', choices=['A', 'B'], default='A',
                        help='Reduced state whose Bloch radius is binned')
    parser.add_argument('--output', type=str, default=estimation_config.output_dir,
                        help='Directory for traces and summaries')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Two-qubit separability probabilities: quasirandom estimation and reference checks',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Hilbert-Schmidt estimate over 20 million points
  python -m src.cli estimate --measure hs --points 20000000

  # Paired alpha0 = 1/4, 3/4 runs with 8 workers
  python -m src.cli estimate --measure bures --points 40000000 --paired --workers 8

  # Verify every closed form and conjecture integral
  python -m src.cli verify --all
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    estimate = sub.add_parser('estimate', help='Quasirandom estimation of separability probabilities')
    _add_run_arguments(estimate)
    estimate.add_argument('--paired', action='store_true',
                          help='Run alpha0 = 1/4 and 3/4 and report their mean')

    bloch = sub.add_parser('bloch-bins', help='Separability profile over reduced Bloch radius')
    _add_run_arguments(bloch, default_measure='hs')

    verify = sub.add_parser('verify', help='Check closed forms and conjecture integrals')
    verify.add_argument('--all', action='store_true', help='Evaluate every registered quantity (default)')
    verify.add_argument('--quantity', action='append', default=None,
                        help=f"Quantity to evaluate (repeatable): {', '.join(TARGETS)}")
    verify.add_argument('--format', choices=['text', 'csv'], default='text')

    abs_sep = sub.add_parser('abs-sep', help='Absolute-separability probabilities by quadrature')
    group = abs_sep.add_mutually_exclusive_group(required=True)
    group.add_argument('--measure', type=str)
    group.add_argument('--all', action='store_true', help='All ten measures')
    group.add_argument('--induced-sweep', type=int, metavar='K',
                       help='Induced measures k = 0..K')

    ratio = sub.add_parser('volume-ratio', help='Ratio of sampled total volumes of two runs')
    ratio.add_argument('summary', help='Run summary JSON')
    ratio.add_argument('reference', help='Reference run summary JSON (e.g. bures)')

    return parser


def dispatch(args: argparse.Namespace) -> int:
    if args.command in ('estimate', 'bloch-bins'):
        config = RunConfig.from_args(args)
        return run_estimate(config) if args.command == 'estimate' else run_bloch_bins(config)

    if args.command == 'verify':
        return run_verify(None if args.all else args.quantity, args.format)

    if args.command == 'abs-sep':
        if args.all:
            kinds = list(STUDIED_KINDS)
        elif args.induced_sweep is not None:
            if args.induced_sweep < 0:
                raise DomainError("--induced-sweep needs K >= 0")
            kinds = [induced(k) for k in range(args.induced_sweep + 1)]
        else:
            kinds = [MeasureKind.parse(args.measure)]
        return run_abs_sep(kinds)

    return run_volume_ratio(args.summary, args.reference)


def main(argv: List[str] = None) -> int:
    """CLI entry point; returns the exit code."""
    logging.basicConfig(level=logging_config.level, format=logging_config.format)
    args = build_parser().parse_args(argv)

    try:
        return dispatch(args)
    except DomainError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
