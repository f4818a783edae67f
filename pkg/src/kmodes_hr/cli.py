"""Command line entry point: ``kmodes run | knee | fitness``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from pathlib import Path

from .analysis import (
    FITNESS_K,
    FITNESS_REPS,
    MOMENT_ESTIMATOR,
    first_principal_component,
    fitness,
    summarize_component,
)
from .core import ContractError
from .engine import DEFAULT_MAX_ITERATIONS
from .harness import IngestError, load_dataset, run_experiment, write_run_directory
from .initialisers import METHODS
from .selection import KneeWarning, build_cost_curve, k_bounds, knee

EXIT_OK = 0
EXIT_INGEST = 2
EXIT_CONFIG = 3

logger = logging.getLogger("kmodes_hr")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="delimited categorical data file")
    p.add_argument("--label-col", default=None, help="class label column (excluded from clustering)")
    p.add_argument("--missing-token", default="?", help="cell value marking missing data")
    p.add_argument("--no-header", action="store_true", help="file has no header row; columns are named 0, 1, ...")
    p.add_argument("--delimiter", default=",")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kmodes", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="repeated k-modes runs for one or more initialisations")
    _data_args(run)
    run.add_argument("--init", default="all", choices=[*METHODS, "all"])
    run.add_argument("--k", required=True, help="an integer, 'classes' or 'knee'")
    run.add_argument("--reps", type=int, default=250)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True)
    run.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITERATIONS)
    run.add_argument("--k-max", type=int, default=None, help="upper k for --k knee")

    kn = sub.add_parser("knee", help="final cost against k and its knee")
    _data_args(kn)
    kn.add_argument("--k-max", type=int, default=None)
    kn.add_argument("--init", default="cao", choices=METHODS)
    kn.add_argument("--reps", type=int, default=1)
    kn.add_argument("--seed", type=int, default=0)
    kn.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITERATIONS)
    kn.add_argument("--out", required=True)

    fi = sub.add_parser("fitness", help="Cao-minus-matching fitness and first-component summary")
    _data_args(fi)
    fi.add_argument("--reps", type=int, default=FITNESS_REPS)
    fi.add_argument("--seed", type=int, default=0)
    fi.add_argument("--k", type=int, default=FITNESS_K)
    fi.add_argument("--out", default=None)
    return parser


def _load(args):
    try:
        return load_dataset(
            args.data,
            missing_token=args.missing_token,
            label_column=args.label_col,
            header=not args.no_header,
            delimiter=args.delimiter,
        )
    except ContractError as exc:
        raise IngestError(str(exc)) from exc


def _k_range(n: int, k_max: int | None) -> range:
    bounds = k_bounds(n)
    if k_max is None:
        return bounds
    if not bounds.start <= k_max < bounds.stop:
        raise ConfigError(f"--k-max must lie in [{bounds.start}, {bounds.stop - 1}]")
    return range(bounds.start, k_max + 1)


def _knee(dataset, ks, method="cao", reps=1, seed=0, max_iter=DEFAULT_MAX_ITERATIONS):
    curve = build_cost_curve(dataset, ks, method, reps, seed, max_iter)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", KneeWarning)
        chosen = knee(curve)
    note = "; ".join(str(w.message) for w in caught) or None
    return curve, chosen, note


def cmd_run(args) -> int:
    dataset, labels, report = _load(args)
    if args.reps < 1:
        raise ConfigError("--reps must be at least 1")
    extra = {}
    if args.k == "classes":
        if report.adjusted_classes is None:
            raise ConfigError("--k classes needs --label-col")
        k = report.adjusted_classes
    elif args.k == "knee":
        _, k, note = _knee(dataset, _k_range(dataset.n, args.k_max), max_iter=args.max_iter)
        extra["knee_warning"] = note
    else:
        try:
            k = int(args.k)
        except ValueError:
            raise ConfigError("--k must be an integer, 'classes' or 'knee'") from None
    methods = METHODS if args.init == "all" else (args.init,)
    records = []
    for method in methods:
        logger.info("running %s with k=%d (%d reps)", method, k, args.reps)
        records += run_experiment(
            dataset,
            k,
            method,
            args.reps,
            args.seed,
            dataset_label=Path(args.data).stem,
            max_iterations=args.max_iter,
        )
    extra.update(k=k, k_mode=args.k, reps=args.reps, seed=args.seed, methods=list(methods))
    out = write_run_directory(args.out, records, report, extra)
    print(f"wrote {len(records)} records for k={k} to {out}")
    return EXIT_OK


def cmd_knee(args) -> int:
    dataset, _, report = _load(args)
    ks = _k_range(dataset.n, args.k_max)
    curve, chosen, note = _knee(dataset, ks, args.init, args.reps, args.seed, args.max_iter)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "cost_curve.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "final_cost"])
        writer.writerows((k, int(c)) for k, c in curve.points)
    payload = {
        "k": chosen,
        "k_min": ks.start,
        "k_max": ks.stop - 1,
        "init": args.init,
        "reps": args.reps,
        "warning": note,
        "adjusted_n": report.adjusted_n,
    }
    (out / "knee.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(f"knee at k={chosen} (searched {ks.start}..{ks.stop - 1})")
    return EXIT_OK


def cmd_fitness(args) -> int:
    dataset, _, _ = _load(args)
    if args.reps < 1:
        raise ConfigError("--reps must be at least 1")
    report = fitness(dataset, args.reps, args.seed, args.k)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        summary = summarize_component(first_principal_component(dataset))
    payload = {**report.as_dict(), "component": summary.as_dict()}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "fitness.json").write_text(json.dumps(report.as_dict(), indent=2) + "\n")
        with open(out / "component_summary.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            fields = list(summary.as_dict())
            writer.writerow(["dataset", *fields, "estimator"])
            writer.writerow(
                [Path(args.data).stem, *(f"{v:.6g}" for v in summary.as_dict().values()), MOMENT_ESTIMATOR]
            )
    print(json.dumps(payload, indent=2))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "knee": cmd_knee, "fitness": cmd_fitness}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except IngestError as exc:
        print(f"kmodes: ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except (ConfigError, ContractError) as exc:
        print(f"kmodes: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
