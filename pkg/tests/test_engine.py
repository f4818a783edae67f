import numpy as np
import pytest

from helpers import random_dataset
from kmodes_hr.core import ContractError, Dataset, cost, mode_of
from kmodes_hr.engine import (
    Clustering,
    DegenerateInitialisation,
    fit,
    initial_assignment,
    iterate,
    select_closest,
)
from kmodes_hr.initialisers import random_init


def check_partition(ds, clustering):
    a = clustering.assignment
    assert a.shape == (ds.n,)
    assert a.min() >= 0 and a.max() < clustering.k
    assert (clustering.sizes() > 0).all()
    assert sum(len(s) for s in clustering.members) == ds.n


def check_modes_are_modes(ds, clustering):
    for l, rows in enumerate(clustering.members):
        counts_ok = mode_of(ds.codes[sorted(rows)], ds.space, current=clustering.modes[l])
        np.testing.assert_array_equal(clustering.modes[l], counts_ok)


class TestSelectClosest:
    def test_nearest(self):
        assert select_closest([0, 1], [[1, 1], [0, 1], [0, 0]]) == 1

    def test_tie_to_lowest_index(self):
        assert select_closest([0, 0], [[1, 0], [0, 1]]) == 0

    def test_no_modes(self):
        with pytest.raises(ContractError):
            select_closest([0], np.empty((0, 1), dtype=int))


class TestInitialAssignment:
    def test_rows_go_to_nearest_mode_then_modes_update(self):
        ds = Dataset.from_rows([["a", "x"], ["a", "y"], ["b", "y"], ["b", "y"]])
        c = initial_assignment(ds, ds.codes[[0, 2]])
        # row 1 ties between both modes and goes to the first
        np.testing.assert_array_equal(c.assignment, [0, 0, 1, 1])
        np.testing.assert_array_equal(c.modes, [[0, 0], [1, 1]])

    def test_empty_initial_cluster(self):
        ds = Dataset.from_rows([["a"], ["b"]])
        with pytest.raises(DegenerateInitialisation) as err:
            initial_assignment(ds, [[0], [0]])
        assert err.value.cluster == 1


class TestFit:
    def test_k_equals_n_is_free(self):
        ds = Dataset.from_rows([["a", "b"], ["c", "d"], ["e", "f"]])
        result = fit(ds, ds.codes)
        assert result.initial_cost == result.final_cost == 0
        assert result.n_iterations == 1 and result.converged

    def test_single_cluster(self):
        ds = Dataset.from_rows([["a", "x"], ["a", "y"], ["b", "y"]])
        result = fit(ds, ds.codes[[0]])
        np.testing.assert_array_equal(result.clustering.modes, [[0, 1]])
        assert result.final_cost == 2

    def test_trace_is_consistent(self):
        rows = [
            ["a", "a", "a"],
            ["a", "a", "b"],
            ["a", "b", "b"],
            ["b", "b", "b"],
            ["c", "b", "b"],
            ["c", "c", "b"],
        ]
        ds = Dataset.from_rows(rows)
        result = fit(ds, ds.codes[[0, 5]])
        assert result.cost_trace[0] == result.initial_cost
        assert list(result.cost_trace) == sorted(result.cost_trace, reverse=True)
        assert result.final_cost == cost(ds, result.clustering.assignment, result.clustering.modes)
        assert result.final_cost <= result.initial_cost
        check_partition(ds, result.clustering)

    def test_modes_must_be_rows(self):
        ds = Dataset.from_rows([["a", "x"], ["b", "y"]])
        with pytest.raises(ContractError):
            fit(ds, [[0, 1], [1, 0]])

    def test_modes_must_be_distinct(self):
        ds = Dataset.from_rows([["a"], ["b"]])
        with pytest.raises(ContractError):
            fit(ds, [[0], [0]])

    def test_k_larger_than_n(self):
        ds = Dataset.from_rows([["a"], ["b"]])
        with pytest.raises(ContractError):
            fit(ds, [[0], [1], [0]])

    def test_max_iterations_cap(self):
        rng = np.random.default_rng(5)
        ds = random_dataset(rng, 60, [3, 3, 3, 3])
        for seed in range(20):
            result = fit(ds, ds.codes[random_init(ds, 5, seed)], max_iterations=1)
            assert result.n_iterations == 1
            assert result.converged == (result.cost_trace[-1] == result.cost_trace[-2])

    def test_reproducible(self):
        ds = random_dataset(np.random.default_rng(2), 50, [4, 3, 2])
        modes = ds.codes[random_init(ds, 4, 9)]
        a, b = fit(ds, modes), fit(ds, modes)
        np.testing.assert_array_equal(a.clustering.assignment, b.clustering.assignment)
        assert a.cost_trace == b.cost_trace


def test_random_instances_descend_and_terminate():
    rng = np.random.default_rng(2024)
    for trial in range(100):
        n = int(rng.integers(2, 61))
        ds = random_dataset(rng, n, rng.integers(1, 5, size=rng.integers(1, 6)))
        k = int(rng.integers(1, min(5, ds.n_distinct()) + 1))
        modes = ds.codes[random_init(ds, k, trial)]
        clustering = initial_assignment(ds, modes)
        check_partition(ds, clustering)
        check_modes_are_modes(ds, clustering)
        previous = cost(ds, clustering.assignment, clustering.modes)
        for _ in range(100):
            moved = iterate(ds, clustering)
            check_partition(ds, clustering)
            check_modes_are_modes(ds, clustering)
            current = cost(ds, clustering.assignment, clustering.modes)
            assert current <= previous
            previous = current
            if moved == 0:
                break
        else:
            pytest.fail("k-modes did not settle within 100 passes")
        result = fit(ds, modes)
        assert result.converged
        assert all(a >= b for a, b in zip(result.cost_trace, result.cost_trace[1:]))


def test_clustering_copy_is_independent():
    c = Clustering(np.array([0, 1]), np.array([[0], [1]]))
    d = c.copy()
    d.assignment[0] = 1
    assert c.assignment[0] == 0
