from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeprod import series as ps

fracs = st.fractions(min_value=-4, max_value=4, max_denominator=6)
N = 8


@given(st.lists(fracs, min_size=N, max_size=N), st.lists(fracs, min_size=N, max_size=N))
def test_mul_commutes(a, b):
    assert ps.mul(a, b, N) == ps.mul(b, a, N)


@given(st.lists(fracs, min_size=N, max_size=N).filter(lambda a: a[0] != 0))
def test_inverse(a):
    one = ps.mul(a, ps.inv(a, N), N)
    assert one == [1] + [0] * (N - 1)


@given(st.lists(fracs, min_size=N, max_size=N).filter(lambda a: a[1] != 0))
def test_revert_is_compositional_inverse(a):
    a = [Fraction(0)] + a[1:]
    b = ps.revert(a, N)
    w = [0, 1] + [0] * (N - 2)
    assert ps.compose(a, b, N) == w
    assert ps.compose(b, a, N) == w


def test_compose_geometric():
    # 1/(1-x) at x = 2w gives sum 2^k w^k
    geo = [Fraction(1)] * 6
    assert ps.compose(geo, [0, 2], 6) == [2**k for k in range(6)]


def test_compose_rejects_constant_inner():
    with pytest.raises(ValueError):
        ps.compose([1, 1], [1, 1], 3)


def test_inv_rejects_zero_constant():
    with pytest.raises(ZeroDivisionError):
        ps.inv([0, 1], 3)
