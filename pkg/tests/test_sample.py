import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qci.errors import EmptySample, IndexOutOfRange, InvalidLevel, NonFiniteValue
from qci.sample import check_level, make_sample, order_statistic

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_order_statistics():
    s = make_sample([3.0, 1.0, 2.0])
    assert s.n == len(s) == 3
    assert [order_statistic(s, i) for i in (1, 2, 3)] == [1.0, 2.0, 3.0]
    assert list(s.values) == [3.0, 1.0, 2.0]


def test_arrays_are_read_only_and_copied():
    src = np.array([2.0, 1.0])
    s = make_sample(src)
    src[0] = 99.0
    assert s.values[0] == 2.0
    with pytest.raises(ValueError):
        s.sorted[0] = 5.0


def test_empty():
    with pytest.raises(EmptySample):
        make_sample([])


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_reports_index(bad):
    with pytest.raises(NonFiniteValue) as info:
        make_sample([1.0, 2.0, bad])
    assert info.value.index == 2


@pytest.mark.parametrize("i", [0, 4, -1, 1.5])
def test_index_out_of_range(i):
    with pytest.raises(IndexOutOfRange):
        order_statistic(make_sample([1, 2, 3]), i)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.5, 2.0, math.nan, "x"])
def test_check_level_rejects(u):
    with pytest.raises(InvalidLevel):
        check_level(u)


@given(st.lists(finite, min_size=1, max_size=50))
def test_sorted_is_permutation_in_order(values):
    s = make_sample(values)
    assert np.all(np.diff(s.sorted) >= 0)
    assert sorted(values) == list(s.sorted)


@given(st.lists(finite, min_size=1, max_size=30), st.floats(0.1, 10), st.floats(-100, 100))
def test_affine_maps_order_statistics(values, scale, shift):
    s = make_sample(values)
    t = s.affine(scale, shift)
    np.testing.assert_allclose(t.sorted, scale * s.sorted + shift)
