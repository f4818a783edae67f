"""Dataset ingestion, repeated runs and the summary/plot data written per run."""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import ContractError, Dataset
from .engine import DEFAULT_MAX_ITERATIONS, fit
from .initialisers import initialise

logger = logging.getLogger(__name__)

METRICS = ("initial_cost", "final_cost", "n_iterations", "elapsed_seconds")
METRIC_TITLES = ("Initial cost", "Final cost", "No. iterations", "Time")
RECORD_FIELDS = (
    "dataset",
    "init",
    "k",
    "seed",
    "initial_cost",
    "final_cost",
    "n_iterations",
    "elapsed_seconds",
)


class IngestError(Exception):
    """The data file could not be turned into a dataset."""


@dataclass
class IngestReport:
    raw_n: int
    adjusted_n: int
    m: int
    raw_classes: int | None = None
    adjusted_classes: int | None = None
    dropped_rows: list[int] = field(default_factory=list)
    source: str = ""
    label_column: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RunRecord:
    dataset: str
    init: str
    k: int
    seed: int | None
    initial_cost: int
    final_cost: int
    n_iterations: int
    elapsed_seconds: float


@dataclass(frozen=True)
class SummaryRow:
    init: str
    n: int
    means: tuple[float, float, float, float]
    stds: tuple[float, float, float, float]

    def formatted(self) -> list[str]:
        return [f"{m:.2f} ({s:.3f})" for m, s in zip(self.means, self.stds)]


def load_dataset(
    path: str | os.PathLike,
    missing_token: str = "?",
    label_column: str | None = None,
    header: bool = True,
    delimiter: str = ",",
) -> tuple[Dataset, list[str] | None, IngestReport]:
    """Read a delimited categorical file, dropping rows with missing values.

    Without a header row, columns are named by position (``"0"``, ``"1"``,
    ...), so ``label_column="0"`` selects the first column.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [
                [cell.strip() for cell in row]
                for row in csv.reader(fh, delimiter=delimiter)
                if any(cell.strip() for cell in row)
            ]
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    if header:
        if not rows:
            raise IngestError(f"{path} is empty")
        names, rows = rows[0], rows[1:]
    else:
        names = [str(j) for j in range(len(rows[0]))] if rows else []
    width = len(names)
    bad = [i for i, r in enumerate(rows) if len(r) != width]
    if bad:
        raise IngestError(f"row {bad[0]} has the wrong number of fields")
    label_idx = None
    if label_column is not None:
        if label_column not in names:
            raise IngestError(f"unknown label column {label_column!r}")
        label_idx = names.index(label_column)

    kept, dropped = [], []
    for i, row in enumerate(rows):
        (dropped if missing_token in row else kept).append(i)
    if not kept:
        raise IngestError("no complete rows remain after dropping missing values")

    attr_cols = [j for j in range(width) if j != label_idx]
    if not attr_cols:
        raise IngestError("no attribute columns besides the label")
    dataset = Dataset.from_rows(
        [[rows[i][j] for j in attr_cols] for i in kept],
        names=[names[j] for j in attr_cols],
        row_ids=kept,
    )
    labels = None
    report = IngestReport(
        raw_n=len(rows),
        adjusted_n=len(kept),
        m=len(attr_cols),
        dropped_rows=dropped,
        source=str(path),
        label_column=label_column,
    )
    if label_idx is not None:
        labels = [rows[i][label_idx] for i in kept]
        report.raw_classes = len({r[label_idx] for r in rows if r[label_idx] != missing_token})
        report.adjusted_classes = len(set(labels))
    logger.info("loaded %s: %d of %d rows kept", path, report.adjusted_n, report.raw_n)
    return dataset, labels, report


def run_experiment(
    dataset: Dataset,
    k: int,
    method: str,
    reps: int,
    base_seed: int = 0,
    *,
    dataset_label: str = "",
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> list[RunRecord]:
    """``reps`` k-modes runs, repetition ``r`` seeded ``base_seed + r``.

    Cao's method is deterministic, so it is run once and its record is
    repeated ``reps`` times with no seed.
    """
    if reps < 1:
        raise ContractError("reps must be at least 1")

    def one(seed):
        modes = dataset.codes[initialise(dataset, k, method, seed)]
        result = fit(dataset, modes, max_iterations, seed=seed, init_label=method)
        if not result.converged:
            logger.warning("%s run (seed %s) hit max_iterations", method, seed)
        return RunRecord(
            dataset=dataset_label,
            init=method,
            k=k,
            seed=seed,
            initial_cost=result.initial_cost,
            final_cost=result.final_cost,
            n_iterations=result.n_iterations,
            elapsed_seconds=result.elapsed_seconds,
        )

    if method == "cao":
        return [one(None)] * reps
    return [one(base_seed + r) for r in range(reps)]


def summarize(records: Sequence[RunRecord]) -> list[SummaryRow]:
    """Mean and sample standard deviation of each metric, per init method."""
    if not records:
        raise ContractError("nothing to summarise")
    rows = []
    for init in dict.fromkeys(r.init for r in records):
        group = [r for r in records if r.init == init]
        data = np.array([[getattr(r, m) for m in METRICS] for r in group], dtype=float)
        stds = data.std(axis=0, ddof=1) if len(group) > 1 else np.zeros(len(METRICS))
        rows.append(
            SummaryRow(init, len(group), tuple(data.mean(axis=0)), tuple(stds))
        )
    return rows


def ecdf(values: Iterable[float]) -> list[tuple[float, float]]:
    """Steps of the empirical CDF: each distinct value with the share <= it."""
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        raise ContractError("ecdf of no values")
    unique, counts = np.unique(values, return_counts=True)
    cum = np.cumsum(counts)
    fractions = cum / cum[-1]
    return [(float(v), float(f)) for v, f in zip(unique, fractions)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def write_records(path: Path, records: Sequence[RunRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow([_fmt(getattr(r, name)) for name in RECORD_FIELDS])


def read_records(path: Path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        return [
            RunRecord(
                dataset=row["dataset"],
                init=row["init"],
                k=int(row["k"]),
                seed=int(row["seed"]) if row["seed"] else None,
                initial_cost=int(row["initial_cost"]),
                final_cost=int(row["final_cost"]),
                n_iterations=int(row["n_iterations"]),
                elapsed_seconds=float(row["elapsed_seconds"]),
            )
            for row in csv.DictReader(fh)
        ]


def write_summary(path: Path, rows: Sequence[SummaryRow]) -> None:
    header = ["init", "n"]
    for metric in METRICS:
        header += [f"{metric}_mean", f"{metric}_std"]
    header += list(METRIC_TITLES)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            cells = [row.init, row.n]
            for mean, std in zip(row.means, row.stds):
                cells += [f"{mean:.2f}", f"{std:.3f}"]
            writer.writerow(cells + row.formatted())


def write_ecdf(path: Path, records: Sequence[RunRecord], metric: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["init", metric, "fraction"])
        for init in dict.fromkeys(r.init for r in records):
            for value, frac in ecdf(getattr(r, metric) for r in records if r.init == init):
                writer.writerow([init, f"{value:g}", f"{frac:.6f}"])


def write_scatter(path: Path, records: Sequence[RunRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["init", "seed", "initial_cost", "final_cost"])
        for r in records:
            writer.writerow([r.init, _fmt(r.seed), r.initial_cost, r.final_cost])


def write_run_directory(
    out: str | os.PathLike,
    records: Sequence[RunRecord],
    ingest: IngestReport,
    extra: dict | None = None,
) -> Path:
    """Write the records, summary, ECDF and scatter files plus ``ingest.json``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(out / "records.csv", records)
    write_summary(out / "summary.csv", summarize(records))
    write_ecdf(out / "ecdf_initial.csv", records, "initial_cost")
    write_ecdf(out / "ecdf_final.csv", records, "final_cost")
    write_scatter(out / "scatter.csv", records)
    payload = ingest.as_dict()
    if extra:
        payload.update(extra)
    (out / "ingest.json").write_text(json.dumps(payload, indent=2) + "\n")
    return out
