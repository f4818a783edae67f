import csv
import json

import numpy as np
import pytest

from helpers import random_dataset
from kmodes_hr.cli import EXIT_CONFIG, EXIT_INGEST, EXIT_OK, main
from kmodes_hr.core import ContractError
from kmodes_hr.harness import (
    IngestError,
    RunRecord,
    ecdf,
    load_dataset,
    read_records,
    run_experiment,
    summarize,
    write_run_directory,
)

OUTPUTS = {
    "records.csv",
    "summary.csv",
    "ecdf_initial.csv",
    "ecdf_final.csv",
    "scatter.csv",
    "ingest.json",
}


def record(init="huang", initial=10, final=10, iters=1, secs=0.5, seed=0):
    return RunRecord("d", init, 2, seed, initial, final, iters, secs)


@pytest.fixture
def data_file(tmp_path):
    rng = np.random.default_rng(0)
    lines = ["colour,shape,size,label"]
    for i in range(60):
        row = [rng.choice(["red", "blue", "green"]), rng.choice(["sq", "tri"]),
               rng.choice(["s", "m", "l", "xl"]), rng.choice(["yes", "no"])]
        lines.append(",".join(row))
    lines[5] = "red,?,s,yes"
    lines[9] = "blue,tri,m,?"
    path = tmp_path / "toy.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestLoad:
    def test_missing_rows_dropped(self, data_file):
        ds, labels, report = load_dataset(data_file, label_column="label")
        assert report.raw_n == 60 and report.adjusted_n == 58
        assert report.dropped_rows == [4, 8]
        assert report.adjusted_n == report.raw_n - len(report.dropped_rows)
        assert ds.m == report.m == 3
        assert len(labels) == ds.n
        assert report.adjusted_classes <= report.raw_classes
        assert ds.row_ids[4] == 5

    def test_no_missing(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("a,b\nx,y\nz,y\n")
        _, labels, report = load_dataset(path)
        assert labels is None and report.dropped_rows == []
        assert report.adjusted_n == report.raw_n == 2

    def test_headerless_positional_names(self, tmp_path):
        path = tmp_path / "f.data"
        path.write_text("1,x,y\n2,x,z\n3,w,z\n")
        ds, labels, _ = load_dataset(path, label_column="0", header=False)
        assert labels == ["1", "2", "3"]
        assert ds.space.names == ("1", "2")

    def test_first_appearance_codes(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("a\nq\np\nq\n")
        ds, _, _ = load_dataset(path)
        assert ds.space.categories == (("q", "p"),)

    @pytest.mark.parametrize(
        "content, kwargs",
        [
            ("a,b\n?,?\n", {}),
            ("a,b\nx,y\n", {"label_column": "c"}),
            ("a,b\nx\n", {}),
            ("", {}),
        ],
    )
    def test_ingest_errors(self, tmp_path, content, kwargs):
        path = tmp_path / "f.csv"
        path.write_text(content)
        with pytest.raises(IngestError):
            load_dataset(path, **kwargs)

    def test_unreadable(self, tmp_path):
        with pytest.raises(IngestError):
            load_dataset(tmp_path / "absent.csv")


class TestRunExperiment:
    def test_cao_replicated(self):
        ds = random_dataset(np.random.default_rng(1), 40, [3, 3, 3])
        records = run_experiment(ds, 3, "cao", 5)
        assert len(records) == 5 and len(set(records)) == 1
        assert records[0].seed is None
        (row,) = summarize(records)
        assert row.stds[:3] == (0.0, 0.0, 0.0)
        assert row.formatted()[0].endswith("(0.000)")

    def test_matching_reproducible(self):
        ds = random_dataset(np.random.default_rng(1), 40, [3, 3, 3])
        strip = lambda rs: [(r.seed, r.initial_cost, r.final_cost, r.n_iterations) for r in rs]
        a = run_experiment(ds, 3, "matching", 2, base_seed=7)
        b = run_experiment(ds, 3, "matching", 2, base_seed=7)
        assert strip(a) == strip(b)
        assert [r.seed for r in a] == [7, 8]

    def test_record_invariants(self):
        ds = random_dataset(np.random.default_rng(2), 50, [3, 4, 2])
        for r in run_experiment(ds, 4, "random", 10):
            assert r.final_cost <= r.initial_cost and r.n_iterations >= 1

    def test_reps_positive(self):
        ds = random_dataset(np.random.default_rng(2), 10, [2, 2])
        with pytest.raises(ContractError):
            run_experiment(ds, 2, "huang", 0)


class TestSummaries:
    def test_two_records(self):
        (row,) = summarize([record(initial=10, final=10), record(initial=20, final=20)])
        assert row.means[0] == 15
        assert row.stds[0] == pytest.approx(7.0710678, abs=1e-6)

    def test_single_record(self):
        (row,) = summarize([record(initial=12)])
        assert row.means[0] == 12 and row.stds == (0.0, 0.0, 0.0, 0.0)

    def test_grouped_by_init_in_order(self):
        rows = summarize([record("matching"), record("cao"), record("matching")])
        assert [(r.init, r.n) for r in rows] == [("matching", 2), ("cao", 1)]

    def test_ecdf(self):
        assert ecdf([5]) == [(5.0, 1.0)]
        assert ecdf([1, 2, 2, 4]) == [(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]

    def test_ecdf_monotone(self):
        steps = ecdf(np.random.default_rng(0).integers(0, 20, size=200))
        fracs = [f for _, f in steps]
        assert fracs == sorted(fracs) and fracs[-1] == 1.0

    def test_empty(self):
        with pytest.raises(ContractError):
            summarize([])
        with pytest.raises(ContractError):
            ecdf([])


def test_run_directory_round_trip(tmp_path, data_file):
    ds, _, report = load_dataset(data_file, label_column="label")
    records = run_experiment(ds, 2, "huang", 3)
    out = write_run_directory(tmp_path / "out", records, report, {"k": 2})
    assert {p.name for p in out.iterdir()} == OUTPUTS
    back = read_records(out / "records.csv")
    assert [(r.seed, r.final_cost) for r in back] == [(r.seed, r.final_cost) for r in records]
    assert json.loads((out / "ingest.json").read_text())["k"] == 2


def _records_without_time(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    t = rows[0].index("elapsed_seconds")
    return [row[:t] + row[t + 1 :] for row in rows]


class TestCli:
    def test_run_all_methods(self, tmp_path, data_file, capsys):
        out = tmp_path / "run"
        args = ["run", "--data", str(data_file), "--label-col", "label", "--init", "all",
                "--k", "classes", "--reps", "3", "--seed", "1", "--out", str(out)]
        assert main(args) == EXIT_OK
        assert {p.name for p in out.iterdir()} == OUTPUTS
        records = read_records(out / "records.csv")
        assert len(records) == 12 and {r.k for r in records} == {2}
        with open(out / "summary.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["init"] for r in rows] == ["random", "huang", "cao", "matching"]
        assert rows[2]["Final cost"].endswith("(0.000)")

    def test_byte_identical_apart_from_time(self, tmp_path, data_file):
        runs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(["run", "--data", str(data_file), "--label-col", "label", "--init", "matching",
                  "--k", "3", "--reps", "4", "--seed", "9", "--out", str(out)])
            runs.append(_records_without_time(out / "records.csv"))
        assert runs[0] == runs[1]

    def test_run_with_knee(self, tmp_path, data_file):
        out = tmp_path / "run"
        code = main(["run", "--data", str(data_file), "--label-col", "label", "--init", "cao",
                     "--k", "knee", "--reps", "1", "--out", str(out)])
        assert code == EXIT_OK
        k = json.loads((out / "ingest.json").read_text())["k"]
        assert 2 <= k <= 7

    def test_knee(self, tmp_path, data_file, capsys):
        out = tmp_path / "knee"
        assert main(["knee", "--data", str(data_file), "--label-col", "label",
                     "--out", str(out)]) == EXIT_OK
        payload = json.loads((out / "knee.json").read_text())
        assert (payload["k_min"], payload["k_max"]) == (2, 7)
        with open(out / "cost_curve.csv", newline="") as fh:
            assert [int(r["k"]) for r in csv.DictReader(fh)] == list(range(2, 8))
        assert f"k={payload['k']}" in capsys.readouterr().out

    def test_fitness(self, tmp_path, data_file, capsys):
        out = tmp_path / "fit"
        code = main(["fitness", "--data", str(data_file), "--label-col", "label",
                     "--reps", "3", "--seed", "2", "--out", str(out)])
        assert code == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert printed["fitness"] == printed["c_cao"] - printed["c_match"]
        assert (out / "component_summary.csv").exists()
        assert json.loads((out / "fitness.json").read_text())["reps_used"] == 3

    @pytest.mark.parametrize(
        "extra",
        [["--k", "abc"], ["--k", "99"], ["--k", "2", "--reps", "0"], ["--k", "classes"]],
    )
    def test_config_errors(self, tmp_path, data_file, extra):
        args = ["run", "--data", str(data_file), "--out", str(tmp_path / "x"), *extra]
        assert main(args) == EXIT_CONFIG

    def test_unknown_init(self, tmp_path, data_file):
        with pytest.raises(SystemExit) as err:
            main(["run", "--data", str(data_file), "--out", str(tmp_path / "x"),
                  "--k", "2", "--init", "kmeans"])
        assert err.value.code == EXIT_CONFIG

    def test_missing_argument(self):
        with pytest.raises(SystemExit) as err:
            main(["run"])
        assert err.value.code == EXIT_CONFIG

    def test_ingest_error(self, tmp_path):
        code = main(["run", "--data", str(tmp_path / "nope.csv"), "--k", "2",
                     "--out", str(tmp_path / "x")])
        assert code == EXIT_INGEST

    def test_all_rows_missing(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("a,b\n?,x\ny,?\n")
        assert main(["knee", "--data", str(path), "--out", str(tmp_path / "x")]) == EXIT_INGEST

