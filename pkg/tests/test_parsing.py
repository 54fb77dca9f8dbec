import pytest
from hypothesis import given, strategies as st

from hgsys.engine import Element
from hgsys.errors import ParseError
from hgsys.parsing import parse_element
from hgsys.scalars import Q, qpow

G = ["x", "y", "t1inv"]


def E(w, c=1):
    return Element.word(tuple(w), c)


def test_basic_syntax():
    assert parse_element("x*y - q^2*y*x", G) == E("xy") - E("yx", qpow(2))
    assert parse_element("x y", G) == E("xy")
    assert parse_element("(x + y)^2", G) == E("xx") + E("xy") + E("yx") + E("yy")
    assert parse_element("x/(q - q^-1)", G) == E("x", (Q - Q.inverse()).inverse())
    assert parse_element("-t1inv", G) == Element.word(("t1inv",), -1)
    assert parse_element("q**2", G) == Element.scalar(qpow(2))


def test_q_can_be_a_generator():
    assert parse_element("q*x", ["q", "x"]) == Element.word(("q", "x"))


@pytest.mark.parametrize("bad", ["", "x +", "x/y", "x^-1", "z", "x)", "(x", "x $ y", "x/0"])
def test_errors(bad):
    with pytest.raises(ParseError):
        parse_element(bad, G)


@given(st.lists(st.tuples(st.lists(st.sampled_from(["x", "y"]), max_size=3), st.integers(-3, 3),
                          st.integers(-2, 2)), max_size=4))
def test_roundtrip_through_text(terms):
    e = Element()
    for w, c, k in terms:
        e = e + Element.word(tuple(w), qpow(k) * c)
    text = " + ".join(f"({c})*" + "*".join(w) if w else f"({c})" for w, c in e.sorted_terms()) or "0"
    assert parse_element(text, ["x", "y"]) == e
