import numpy as np
import pytest

from proxlogit import Dataset


def make_dataset(seed: int, d: int, n: int) -> Dataset:
    """Generic random instance: standard-normal features, fair-coin labels.

    Independent of the package's own synthetic generator so it can serve as
    an oracle-side fixture.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, n))
    y = rng.integers(0, 2, size=n).astype(float)
    if y.min() == y.max():  # keep both classes present
        y[0] = 1.0 - y[0]
    return Dataset(X, y)


@pytest.fixture
def small_data() -> Dataset:
    return make_dataset(seed=11, d=12, n=40)
