"""Command-line surface: one thin subcommand per pipeline operation.

Subcommands:
    schedule   generate a block crossover schedule as CSV
    validate   check an observations file against a schedule
    scale      min-max scale a ratings file per rater
    binarize   median-threshold and majority-vote a ratings file
    fit        fit the AR(1) model per participant, write fit CSV
    report     run a pipeline and render the results table (csv/markdown)
    permute    estimate type I error by label permutation (seed required)

Every command exits 0 on success and nonzero on failure with a
machine-readable category on stderr ("<Category>: <message>"). When --out
is omitted, files go to $NOF1LAB_OUTDIR under a default name, or to stdout
when that is unset. `validate` exits 3 when violations were found.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO, Union

from . import io
from .design import ScheduleConfig, generate_schedule, validate_observations
from .errors import Nof1Error
from .permutation import SCHEMES, PermutationConfig, estimate_type1
from .pipelines import RunConfig, load_outcome_series, run_pipeline
from .scoring import binarize_ratings, scale_ratings

OUTDIR_ENV = "NOF1LAB_OUTDIR"


def _resolve_out(out: Optional[str], default_name: str) -> Union[Path, TextIO]:
    if out:
        return Path(out)
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir:
        directory = Path(outdir)
        directory.mkdir(parents=True, exist_ok=True)
        return directory / default_name
    return sys.stdout


def _announce(target: Union[Path, TextIO], what: str) -> None:
    if isinstance(target, Path):
        print(f"wrote {what} to {target}")


def _add_design_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--blocks", type=int, default=4, help="number of blocks")
    parser.add_argument(
        "--baseline-days", type=int, default=2, help="untreated days per block"
    )
    parser.add_argument(
        "--treatment-days", type=int, default=2, help="treated days per block"
    )
    parser.add_argument(
        "--slots", type=int, default=3, help="observations per day"
    )
    parser.add_argument(
        "--label", choices=("A", "B"), default="A", help="treatment product label"
    )
    parser.add_argument(
        "--treatment-first",
        action="store_true",
        help="treated days open each block instead of closing it",
    )


def _design_from_args(args: argparse.Namespace) -> ScheduleConfig:
    return ScheduleConfig(
        n_blocks=args.blocks,
        baseline_days_per_block=args.baseline_days,
        treatment_days_per_block=args.treatment_days,
        slots_per_day=args.slots,
        treatment_label=args.label,
        start_with_baseline=not args.treatment_first,
    )


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--observations", required=True, help="observations CSV")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--ratings", help="raw multi-rater ratings CSV")
    group.add_argument("--scores", help="precomputed per-image scores CSV")
    parser.add_argument(
        "--method", choices=("REML", "ML"), default="REML", help="estimation criterion"
    )
    parser.add_argument("--alpha", type=float, default=0.05, help="test level")


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        observations=args.observations,
        ratings=args.ratings,
        scores=args.scores,
        pipeline="manual" if args.ratings else "scores",
        method=args.method,
        alpha=args.alpha,
    )


def _cmd_schedule(args: argparse.Namespace) -> int:
    schedule = generate_schedule(_design_from_args(args), args.participant)
    target = _resolve_out(args.out, "schedule.csv")
    io.write_schedule_csv(target, schedule)
    _announce(target, f"{len(schedule)}-entry schedule")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    design = _design_from_args(args)
    observations = io.load_observations(args.observations)
    groups: dict[str, list] = {}
    for obs in observations:
        if args.participant and obs.participant_id != args.participant:
            continue
        groups.setdefault(obs.participant_id, []).append(obs)
    if not groups:
        print("no observations to validate")
        return 0
    total = 0
    for pid in sorted(groups):
        schedule = generate_schedule(design, pid)
        report = validate_observations(schedule, groups[pid])
        if report.ok:
            print(f"participant {pid}: ok ({len(groups[pid])} observations)")
        else:
            total += len(report.violations)
            print(f"participant {pid}: {len(report.violations)} violation(s)")
            for v in report.violations:
                print(f"  {v.rule} at {v.ref}: {v.message}")
    if total:
        print(f"ScheduleViolation: {total} violation(s) found", file=sys.stderr)
        return 3
    return 0


def _cmd_scale(args: argparse.Namespace) -> int:
    scaled = scale_ratings(io.load_ratings(args.ratings))
    target = _resolve_out(args.out, "scaled_ratings.csv")
    io.write_ratings(target, scaled)
    _announce(target, "scaled ratings")
    return 0


def _cmd_binarize(args: argparse.Namespace) -> int:
    labels = binarize_ratings(io.load_ratings(args.ratings))
    target = _resolve_out(args.out, "labels.csv")
    io.write_labels(target, labels)
    _announce(target, f"{len(labels.labels)} labels")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    results = run_pipeline(_run_config(args))
    target = _resolve_out(args.out, "fit.csv")
    io.write_fit_csv(target, [(r.participant_id, r.fit, r.test) for r in results])
    _announce(target, f"fits for {len(results)} participant(s)")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    results = run_pipeline(_run_config(args))
    default = "report.md" if args.format == "markdown" else "report.csv"
    target = _resolve_out(args.out, default)
    io.emit_report([r.to_row() for r in results], target, format=args.format)
    _announce(target, f"report with {len(results)} row(s)")
    return 0


def _cmd_permute(args: argparse.Namespace) -> int:
    series = load_outcome_series(_run_config(args))
    if args.participant not in series:
        print(
            f"ParticipantMismatch: no observations for participant "
            f"{args.participant!r}; file has {sorted(series)}",
            file=sys.stderr,
        )
        return 2
    perm_config = PermutationConfig(
        master_seed=args.seed,
        n_iterations=args.iterations,
        alpha=args.alpha,
        scheme=args.scheme,
        block_days=args.block_days,
    )
    report = estimate_type1(
        series[args.participant], perm_config, method=args.method, n_jobs=args.jobs
    )
    target = _resolve_out(args.out, "permutation.csv")
    io.write_permutation_csv(target, report)
    _announce(target, f"{perm_config.n_iterations} permutation p-values")
    print(
        f"type I error estimate: {report.type1_estimate:.4g} "
        f"({report.n_rejections}/{report.n_valid} rejections at "
        f"alpha={perm_config.alpha})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nof1lab",
        description=(
            "Design, score, and analyze single-participant crossover trials "
            "with AR(1)-errors regression and permutation calibration."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_schedule = sub.add_parser("schedule", help="generate a crossover schedule")
    p_schedule.add_argument("--participant", required=True, help="participant id")
    _add_design_flags(p_schedule)
    p_schedule.add_argument("--out", help="output CSV path")
    p_schedule.set_defaults(func=_cmd_schedule)

    p_validate = sub.add_parser(
        "validate", help="check observations against a schedule"
    )
    p_validate.add_argument("--observations", required=True)
    p_validate.add_argument("--participant", help="limit the check to one participant")
    _add_design_flags(p_validate)
    p_validate.set_defaults(func=_cmd_validate)

    p_scale = sub.add_parser("scale", help="min-max scale ratings per rater")
    p_scale.add_argument("--ratings", required=True)
    p_scale.add_argument("--out")
    p_scale.set_defaults(func=_cmd_scale)

    p_binarize = sub.add_parser(
        "binarize", help="median-threshold ratings into 0/1 consensus labels"
    )
    p_binarize.add_argument("--ratings", required=True)
    p_binarize.add_argument("--out")
    p_binarize.set_defaults(func=_cmd_binarize)

    p_fit = sub.add_parser("fit", help="fit the AR(1) model per participant")
    _add_pipeline_flags(p_fit)
    p_fit.add_argument("--out")
    p_fit.set_defaults(func=_cmd_fit)

    p_report = sub.add_parser("report", help="render the per-participant results table")
    _add_pipeline_flags(p_report)
    p_report.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p_report.add_argument("--out")
    p_report.set_defaults(func=_cmd_report)

    p_permute = sub.add_parser(
        "permute", help="estimate type I error by permuting treatment labels"
    )
    _add_pipeline_flags(p_permute)
    p_permute.add_argument("--participant", required=True)
    p_permute.add_argument(
        "--seed", type=int, required=True, help="master seed (required; no default)"
    )
    p_permute.add_argument("--iterations", type=int, default=1000)
    p_permute.add_argument("--scheme", choices=SCHEMES, default="unrestricted")
    p_permute.add_argument(
        "--block-days", type=int, default=4, help="days per block for within_block"
    )
    p_permute.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_permute.add_argument("--out")
    p_permute.set_defaults(func=_cmd_permute)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Nof1Error as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"InvalidArgument: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
