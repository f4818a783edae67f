"""scikit-learn compatible k-modes estimator."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .core import Dataset
from .engine import DEFAULT_MAX_ITERATIONS, fit
from .initialisers import METHODS, STOCHASTIC, initialise
from .validation import check_categorical_array, check_n_clusters, encode_with_space


class KModes(ClusterMixin, TransformerMixin, BaseEstimator):
    """k-modes clustering for categorical data.

    Parameters
    ----------
    n_clusters : int, default=8
        Number of clusters (and modes) to form.
    init : {'matching', 'cao', 'huang', 'random'}, default='matching'
        How the initial modes are chosen. ``'matching'`` replaces sampled
        potential modes with data points via a resident-optimal stable
        matching; ``'cao'`` is deterministic.
    n_init : int, default=1
        Number of seeded runs for stochastic initialisations; the run with
        the lowest final cost is kept. Ignored for ``'cao'``.
    max_iter : int, default=100
        Maximum number of passes over the data after the initial assignment.
    random_state : int, RandomState instance or None, default=None
        Integer seeds are used as-is (run ``r`` gets ``random_state + r``),
        so results line up with the functional API.

    Attributes
    ----------
    cluster_centroids_ : ndarray of shape (n_clusters, n_features)
        Modes as category labels.
    modes_ : ndarray of shape (n_clusters, n_features)
        Modes as integer codes under ``space_``.
    labels_ : ndarray of shape (n_samples,)
    cost_ : int
        Summed dissimilarity of the training samples to their modes.
    initial_cost_ : int
    n_iter_ : int
    init_rows_ : ndarray of shape (n_clusters,)
        Training-sample indices used as initial modes.
    seed_ : int or None
        Seed of the kept run.
    """

    def __init__(
        self,
        n_clusters=8,
        init="matching",
        n_init=1,
        max_iter=DEFAULT_MAX_ITERATIONS,
        random_state=None,
    ):
        self.n_clusters = n_clusters
        self.init = init
        self.n_init = n_init
        self.max_iter = max_iter
        self.random_state = random_state

    def _base_seed(self) -> int:
        if isinstance(self.random_state, (int, np.integer)) and not isinstance(
            self.random_state, bool
        ):
            return int(self.random_state)
        return int(check_random_state(self.random_state).randint(0, 2**31 - 1))

    def fit(self, X, y=None):
        if self.init not in METHODS:
            raise ValueError(f"init must be one of {METHODS}, got {self.init!r}")
        if int(self.max_iter) < 1 or int(self.n_init) < 1:
            raise ValueError("max_iter and n_init must be positive")
        X = check_categorical_array(X)
        dataset = Dataset.from_rows(X.tolist())
        k = check_n_clusters(self.n_clusters, dataset.n_distinct())

        if self.init in STOCHASTIC:
            base = self._base_seed()
            seeds = [base + r for r in range(int(self.n_init))]
        else:
            seeds = [None]
        best = best_rows = None
        for seed in seeds:
            rows = initialise(dataset, k, self.init, seed)
            result = fit(
                dataset, dataset.codes[rows], int(self.max_iter), seed=seed, init_label=self.init
            )
            if best is None or result.final_cost < best.final_cost:
                best, best_rows = result, rows

        self.space_ = dataset.space
        self.n_features_in_ = dataset.m
        self.modes_ = best.clustering.modes.copy()
        self.cluster_centroids_ = np.array(
            [dataset.space.decode(z) for z in self.modes_], dtype=object
        )
        self.labels_ = best.clustering.assignment.copy()
        self.cost_ = best.final_cost
        self.initial_cost_ = best.initial_cost
        self.n_iter_ = best.n_iterations
        self.converged_ = best.converged
        self.init_rows_ = np.asarray(best_rows)
        self.seed_ = best.seed
        self.fit_result_ = best
        return self

    def _codes(self, X) -> np.ndarray:
        check_is_fitted(self, "modes_")
        X = check_categorical_array(X, n_features=self.n_features_in_)
        return encode_with_space(X, self.space_)

    def transform(self, X):
        """Dissimilarity of each sample to each mode, shape (n_samples, n_clusters)."""
        codes = self._codes(X)
        return np.count_nonzero(codes[:, None, :] != self.modes_[None, :, :], axis=2)

    def predict(self, X):
        """Index of the closest mode; ties go to the lowest index."""
        return np.argmin(self.transform(X), axis=1)

    def score(self, X, y=None):
        """Negative summed dissimilarity of ``X`` to its closest modes."""
        return -float(self.transform(X).min(axis=1).sum())
