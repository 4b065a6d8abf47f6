import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kakutani import _purekernels, kernels

compiled = pytest.mark.skipif(kernels._ckernels is None, reason="compiled kernels not built")

point_sets = st.integers(1, 500).flatmap(
    lambda d: st.tuples(st.just(d), st.lists(st.integers(0, d - 1), min_size=1, max_size=60, unique=True).map(sorted))
)


@compiled
@given(point_sets)
@settings(max_examples=200, deadline=None)
def test_discrepancy_kernels_agree(case):
    d, nums = case
    a = kernels._ckernels.discrepancy_fast(nums, d)
    b = _purekernels.discrepancy_fast(nums, d)
    c = kernels._ckernels.discrepancy_bruteforce(nums, d)
    e = _purekernels.discrepancy_bruteforce(nums, d)
    assert tuple(a) == tuple(b) == tuple(c) == tuple(e)


@compiled
def test_scaled_endpoints_agree():
    # dyadic scheme on the grid D = 2^10
    A, C, Q, D = [1, 1], [0, 1], 2, 2**10
    raw_c = sorted(set(int(v) for v in kernels._ckernels.scaled_endpoints(A, C, Q, D, 1, 2**11 - 1, 10)))
    raw_p = sorted(set(_purekernels.scaled_endpoints(A, C, Q, D, 1, 2**11 - 1, 10)))
    assert raw_c == raw_p == list(range(2**10))


def test_forced_python_backend():
    nums = sorted(random.Random(3).sample(range(1000), 50))
    assert tuple(kernels.discrepancy_fast(nums, 1000, backend="python")) == tuple(
        _purekernels.discrepancy_fast(nums, 1000)
    )


def test_large_denominators_fall_back():
    # beyond int64 the dispatcher must use Python integers
    d = 3**60
    nums = [0, d // 3, 2 * d // 3]
    ext, star, scale = kernels.discrepancy_fast(nums, d)
    assert (ext, star) == tuple(_purekernels.discrepancy_fast(nums, d))[:2]
