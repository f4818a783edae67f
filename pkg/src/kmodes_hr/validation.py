"""Input checks for the estimator API."""

from __future__ import annotations

import numbers

import numpy as np

from .core import AttributeSpace


def check_categorical_array(X, *, n_features: int | None = None) -> np.ndarray:
    """Return ``X`` as a 2-d object array of category labels (strings).

    Accepts anything ``numpy.asarray`` understands, including DataFrames.
    Missing values (``None`` or float NaN) are rejected since k-modes has no
    notion of them.
    """
    if hasattr(X, "to_numpy"):
        X = X.to_numpy()
    arr = np.asarray(X, dtype=object)
    if arr.ndim != 2:
        raise ValueError(
            f"expected a 2-d array of shape (n_samples, n_features), got ndim={arr.ndim}"
        )
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"found array with shape {arr.shape}; need at least one sample and feature")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"X has {arr.shape[1]} features, expected {n_features}")
    out = np.empty(arr.shape, dtype=object)
    for idx, value in np.ndenumerate(arr):
        if value is None or (isinstance(value, numbers.Real) and value != value):
            raise ValueError("input contains missing values (None or NaN)")
        if isinstance(value, (np.integer, np.floating)):
            value = value.item()
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        out[idx] = str(value)
    return out


def encode_with_space(X: np.ndarray, space: AttributeSpace) -> np.ndarray:
    """Codes of ``X`` under a fitted space; unseen categories become ``-1``."""
    lookups = [{c: s for s, c in enumerate(col)} for col in space.categories]
    codes = np.empty(X.shape, dtype=np.int64)
    for j, lookup in enumerate(lookups):
        codes[:, j] = [lookup.get(v, -1) for v in X[:, j]]
    return codes


def check_n_clusters(n_clusters, n_distinct: int) -> int:
    if not isinstance(n_clusters, numbers.Integral) or isinstance(n_clusters, bool):
        raise TypeError(f"n_clusters must be an int, got {type(n_clusters).__name__}")
    if not 1 <= n_clusters <= n_distinct:
        raise ValueError(
            f"n_clusters={n_clusters} must lie in [1, {n_distinct}] (distinct samples)"
        )
    return int(n_clusters)
