import numpy as np

from kmodes_hr.core import Dataset
from kmodes_hr.matching import HRInstance


def random_dataset(rng, n, sizes):
    cols = [rng.integers(0, d, size=n) for d in sizes]
    return Dataset.from_rows(np.column_stack(cols).astype(str).tolist())


def random_game(rng, max_residents=5, max_hospitals=5, max_capacity=3, full_lists=False):
    n_r = int(rng.integers(1, max_residents + 1))
    n_h = int(rng.integers(1, max_hospitals + 1))
    residents = [f"r{i}" for i in range(n_r)]
    hospitals = [f"h{j}" for j in range(n_h)]
    f = {}
    for r in residents:
        size = n_h if full_lists else int(rng.integers(1, n_h + 1))
        f[r] = [hospitals[j] for j in rng.permutation(n_h)[:size]]
    g = {}
    for h in hospitals:
        rankers = [r for r in residents if h in f[r]]
        g[h] = [rankers[i] for i in rng.permutation(len(rankers))]
    caps = {h: int(rng.integers(1, max_capacity + 1)) for h in hospitals}
    return HRInstance(residents, hospitals, caps, f, g)
