import numpy as np
import pytest
from hypothesis import given, strategies as st

from flatmeans.errors import (
    AllZero,
    DimensionMismatch,
    EmptySet,
    NegativeWeight,
    NonFiniteValue,
    NotOrthonormal,
    SumNotOne,
)
from flatmeans.model import Clustering, Dataset, Flat, WeightVector, validate_weights
from flatmeans.pca import fit_flat


@pytest.mark.parametrize("raw", [(1, 0), (0.5, 0.5)])
def test_valid_weights_pass_through(raw):
    assert validate_weights(raw).weights.tolist() == list(raw)


def test_normalize_divides_by_sum():
    assert validate_weights((2, 2), normalize=True).weights.tolist() == [0.5, 0.5]


def test_weight_errors():
    with pytest.raises(SumNotOne):
        validate_weights((0.3, 0.3))
    with pytest.raises(NegativeWeight):
        validate_weights((1.5, -0.5))
    with pytest.raises(AllZero):
        validate_weights((0, 0), normalize=True)
    with pytest.raises(NonFiniteValue):
        validate_weights((np.nan, 1))


def test_decimal_input_within_sum_tolerance():
    assert len(validate_weights((0.1, 0.2, 0.7))) == 3


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=8).filter(lambda v: sum(v) > 1e-6))
def test_normalized_weights_always_valid(raw):
    w = validate_weights(raw, normalize=True)
    assert abs(w.weights.sum() - 1) <= 1e-9
    assert np.all(w.weights >= 0)


def test_flat_rejects_non_orthonormal_basis():
    with pytest.raises(NotOrthonormal):
        Flat([0, 0], [[2, 0]])
    with pytest.raises(NotOrthonormal):
        Flat([0, 0, 0], [[1, 0, 0], [1, 1e-3, 0]])


def test_flat_dimension_rules():
    assert Flat([1, 2]).flat_dim == 0
    with pytest.raises(DimensionMismatch):
        Flat([0, 0], [[1, 0], [0, 1]])
    with pytest.raises(DimensionMismatch):
        Flat([0, 0], [[1, 0, 0]])
    with pytest.raises(NonFiniteValue):
        Flat([np.inf, 0])


def test_flat_is_immutable():
    f = Flat([0.0, 0.0], [[1.0, 0.0]])
    with pytest.raises(ValueError):
        f.center[0] = 3.0


def test_fitted_flat_revalidates(rng):
    for _ in range(50):
        N = int(rng.integers(2, 7))
        n = int(rng.integers(0, N))
        X = rng.normal(size=(int(rng.integers(1, 12)), N)) * rng.uniform(0.01, 100)
        f = fit_flat(X, n)
        Flat(f.center, f.basis)  # must not raise


def test_dataset_validation():
    with pytest.raises(EmptySet):
        Dataset(np.zeros((0, 2)))
    with pytest.raises(NonFiniteValue):
        Dataset([[0, np.nan]])
    assert Dataset([[1, 2], [3, 4]]).ambient_dim == 2


def test_clustering_rejects_bad_index():
    f = Flat([0, 0])
    with pytest.raises(DimensionMismatch):
        Clustering([0, 1], [f], WeightVector([1.0]), 0.0)
