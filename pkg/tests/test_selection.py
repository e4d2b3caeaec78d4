import random

import pytest
from hypothesis import given, settings, strategies as st

from esp_router.selection import floyd_rivest_select, smallest_k


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=60), st.data())
def test_smallest_k_matches_sort(items, data):
    k = data.draw(st.integers(0, len(items) + 2))
    got = smallest_k(items, k)
    assert sorted(got) == sorted(items)[:k]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=40), st.data())
def test_select_partitions(items, data):
    k = data.draw(st.integers(0, len(items) - 1))
    a = floyd_rivest_select(list(items), k)
    assert a[k] == sorted(items)[k]
    assert all(x <= a[k] for x in a[:k]) and all(x >= a[k] for x in a[k + 1:])


def test_large_input_uses_sampling_path():
    rng = random.Random(3)
    items = [(rng.random(), i) for i in range(20000)]
    assert sorted(smallest_k(items, 5000)) == sorted(items)[:5000]


def test_bad_k():
    with pytest.raises(IndexError):
        floyd_rivest_select([1, 2], 2)
    assert smallest_k([3, 1], 0) == []
