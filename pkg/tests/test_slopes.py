import pytest
from hypothesis import given, strategies as st

from veerobs.slopes import Slope, SlopeError, complete, filled_cusps, format_filling, parse_filling


@pytest.mark.parametrize("text, p, q", [
    ("2", 2, 1), ("-1/3", -1, 3), ("1/-3", -1, 3), ("-3,1", -3, 1), ("(2,4)", 1, 2),
    ("inf", 1, 0), ("-1/0", 1, 0), ("4/2", 2, 1),
])
def test_parse_normalises(text, p, q):
    assert Slope.parse(text) == (p, q)


@pytest.mark.parametrize("text", ["", "x", "1/2/3", "0/0", "1.5"])
def test_parse_rejects(text):
    with pytest.raises(SlopeError):
        Slope.parse(text)


def test_fillings():
    fill = parse_filling("(*;1/2;2)")
    assert fill == (None, Slope(1, 2), Slope(2, 1))
    assert filled_cusps(fill) == [1, 2]
    assert format_filling(fill) == "(*;1/2;2)"
    assert complete(2) == (None, None)
    assert parse_filling("(-4/1)") == (Slope(-4, 1),)


slopes = st.builds(Slope.make, st.integers(-50, 50), st.integers(-50, 50)).filter(lambda s: s is not None)


@given(st.lists(st.one_of(st.none(), st.integers(-30, 30).flatmap(
    lambda p: st.integers(-30, 30).filter(lambda q: p or q).map(lambda q: Slope.make(p, q)))), min_size=1, max_size=4))
def test_filling_text_round_trip(fill):
    assert parse_filling(format_filling(fill)) == tuple(fill)


@given(st.integers(-100, 100), st.integers(-100, 100), st.integers(1, 7))
def test_scaling_is_the_same_slope(p, q, k):
    if p == 0 and q == 0:
        return
    assert Slope.make(p, q) == Slope.make(k * p, k * q) == Slope.make(-k * p, -k * q)
