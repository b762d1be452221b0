import pytest
from hypothesis import given
from hypothesis import strategies as st

from sdemoments import EstimatePair, extrapolate, extrapolate1, extrapolate2


def test_first_order_example():
    # m = 1 + 1/M
    assert extrapolate1(EstimatePair(1 + 1 / 9, 1 + 1 / 10, 9, 10)) == pytest.approx(1.0, rel=1e-14)


def test_second_order_example():
    assert extrapolate2(EstimatePair(2 + 3 / 81, 2 + 3 / 100, 9, 10)) == pytest.approx(2.0, rel=1e-14)


def test_equal_estimates_are_fixed_points():
    for order in (1, 2):
        assert extrapolate(EstimatePair(0.25, 0.25, 4, 8), order) == 0.25


def test_order_dispatch():
    pair = EstimatePair(0.3, 0.2, 10, 20)
    assert extrapolate(pair, 1) == extrapolate1(pair)
    assert extrapolate(pair, 2) == extrapolate2(pair)
    assert extrapolate(EstimatePair(5 + 1 / 8, 5 + 1 / 27, 2, 3), 3) == pytest.approx(5, rel=1e-14)
    with pytest.raises(ValueError):
        extrapolate(pair, 0)


def test_pair_validation():
    with pytest.raises(ValueError):
        EstimatePair(1.0, 2.0, 5, 5)
    with pytest.raises(ValueError):
        EstimatePair(1.0, 2.0, 0, 5)


finite = st.floats(-1e3, 1e3, allow_nan=False)
nonzero = finite.filter(lambda c: abs(c) > 1e-3)
counts = st.integers(1, 10_000)


@given(limit=finite, c=nonzero, m1=counts, gap=st.integers(1, 100))
def test_first_order_exact_on_c_over_m(limit, c, m1, gap):
    m2 = m1 + gap
    pair = EstimatePair(limit + c / m1, limit + c / m2, m1, m2)
    scale = max(abs(limit), abs(c))
    assert abs(extrapolate1(pair) - limit) <= 1e-12 * scale + 1e-300


@given(limit=finite, c=nonzero, m1=counts, gap=st.integers(1, 100))
def test_second_order_exact_on_c_over_m_squared(limit, c, m1, gap):
    m2 = m1 + gap
    pair = EstimatePair(limit + c / m1**2, limit + c / m2**2, m1, m2)
    scale = max(abs(limit), abs(c))
    assert abs(extrapolate2(pair) - limit) <= 1e-12 * scale + 1e-300
