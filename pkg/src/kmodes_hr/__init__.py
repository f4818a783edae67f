"""k-modes clustering with Huang, Cao and stable-matching initialisations."""

from .core import (
    AttributeSpace,
    ContractError,
    Dataset,
    cost,
    densities,
    density,
    dissimilarity,
    frequencies,
    mode_of,
    summed_dissimilarity,
)
from .engine import Clustering, FitResult, fit
from .estimator import KModes
from .initialisers import (
    METHODS,
    cao_init,
    huang_init,
    initialise,
    matching_init,
    random_init,
    sample_potential_modes,
)
from .matching import HRInstance, Matching, blocking_pairs, is_stable, solve

__all__ = [
    "AttributeSpace",
    "Clustering",
    "ContractError",
    "Dataset",
    "FitResult",
    "HRInstance",
    "KModes",
    "METHODS",
    "Matching",
    "blocking_pairs",
    "cao_init",
    "cost",
    "densities",
    "density",
    "dissimilarity",
    "fit",
    "frequencies",
    "huang_init",
    "initialise",
    "is_stable",
    "matching_init",
    "mode_of",
    "random_init",
    "sample_potential_modes",
    "solve",
    "summed_dissimilarity",
]

__version__ = "0.1.0"
