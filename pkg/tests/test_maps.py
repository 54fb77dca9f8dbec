import pytest
from hypothesis import given, strategies as st

from hgsys.constructions import tensor
from hgsys.engine import Element
from hgsys.errors import SignatureMismatch
from hgsys.maps import (FAILED, VERIFIED, Morphism, MultiplyLegs, TensorElement, block_flip, compose,
                        equal_morphisms, flip, identity, leg_lift, reverse_legs)
from hgsys.oracle import in_truncated_ideal
from hgsys.scalars import qpow

from conftest import B, hopf, kashiwara

BA1 = B("A1")
Bo = BA1.op()
THETA = kashiwara("A1").torsor.theta
GENS = BA1.presentation.names  # ep1, f1, t1, t1inv


def one_leg(h, word, c=1):
    return tensor((h,), (c, word))


def test_theta_squared_on_e():
    th2 = compose(THETA, THETA)
    assert th2(one_leg(BA1, "ep1")) == one_leg(BA1, "ep1", qpow(-4))
    assert th2(one_leg(BA1, "f1")) == one_leg(BA1, "f1", qpow(4))
    assert th2(one_leg(BA1, "t1")) == one_leg(BA1, "t1")


def test_counit_absorbs_antipode():
    H = hopf("Uprime", "A1")
    assert equal_morphisms(compose(H.counit, H.antipode), H.counit)
    assert H.counit(one_leg(H.handle, "t1")) == tensor((), (1,))
    assert H.counit(one_leg(H.handle, "ep1")).terms == {}


def test_leg_lift_applies_on_one_leg():
    H = hopf("Uprime", "A1")
    A = H.handle
    D = H.coproduct
    x = tensor((A, A), (1, "ep1", "t1"))
    got = leg_lift(D, 0, (A, A))(x)
    want = tensor((A, A, A), (1, "ep1", "", "t1"), (1, "t1", "ep1", "t1"))
    assert got == want
    got = leg_lift(D, 1, (A, A))(x)
    assert got == tensor((A, A, A), (1, "ep1", "t1", "t1"))


def test_multiply_legs_respects_orientation():
    x = tensor((BA1, BA1), (1, "ep1", "f1"))
    assert MultiplyLegs((BA1, BA1), 0)(x) == one_leg(BA1, "ep1 f1")
    # into B^op the stored product is reversed
    assert MultiplyLegs((BA1, BA1), 0, Bo)(x) == one_leg(Bo, "f1 ep1")
    # opposite legs are multiplied in the straight algebra unless told otherwise
    y = tensor((Bo, Bo), (1, "ep1", "f1"))
    assert MultiplyLegs((Bo, Bo), 0)(y) == one_leg(BA1, "ep1 f1")
    assert MultiplyLegs((Bo, Bo), 0, Bo)(y) == one_leg(Bo, "f1 ep1")


def test_multiply_legs_rejects_foreign_legs():
    H = hopf("Uprime", "A1").handle
    with pytest.raises(SignatureMismatch):
        MultiplyLegs((BA1, H), 0)
    with pytest.raises(SignatureMismatch):
        MultiplyLegs((BA1,), 0)


def test_opposite_leg_multiplies_backwards():
    x, y = one_leg(Bo, "ep1"), one_leg(Bo, "f1")
    assert x * y == one_leg(Bo, "f1 ep1")
    # and in B: ep f = q^2 f ep + 1
    assert one_leg(BA1, "ep1") * one_leg(BA1, "f1") == tensor((BA1,), (qpow(2), "f1 ep1"), (1, ""))


def test_permutations():
    sig = (BA1, Bo, BA1)
    x = tensor(sig, (1, "ep1", "f1", "t1"))
    assert block_flip(sig, (1, 2))(x).sig == (Bo, BA1, BA1)
    assert block_flip(sig, (1, 2))(x).terms == {(("f1",), ("t1",), ("ep1",)): x.terms[(("ep1",), ("f1",), ("t1",))]}
    assert reverse_legs(sig)(x) == tensor((BA1, Bo, BA1), (1, "t1", "f1", "ep1"))
    assert flip(sig, 0, 2)(x) == reverse_legs(sig)(x)
    with pytest.raises(SignatureMismatch):
        block_flip(sig, (1, 1))


words = st.lists(st.sampled_from(GENS), max_size=2).map(lambda w: " ".join(w))


@st.composite
def tensors(draw):
    sig = (BA1, Bo)
    acc = TensorElement.zero(sig)
    for _ in range(draw(st.integers(1, 2))):
        acc = acc + tensor(sig, (qpow(draw(st.integers(-1, 1))), draw(words), draw(words)))
    return acc


@given(tensors(), tensors(), tensors())
def test_tensor_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(tensors(), tensors())
def test_morphism_is_multiplicative(a, b):
    # μ is an algebra map, so μ(xy) = μ(x)μ(y) on single-leg elements
    mu = kashiwara("A1").torsor.mu
    x = TensorElement((BA1,), {(k[0],): c for k, c in a.terms.items()})
    y = TensorElement((BA1,), {(k[0],): c for k, c in b.terms.items()})
    assert mu(x * y) == mu(x) * mu(y)


def bad_theta():
    imgs = dict(THETA.images)
    imgs["t1"] = one_leg(BA1, "")
    imgs["t1inv"] = one_leg(BA1, "")
    return Morphism("t↦1", BA1, (BA1,), imgs)


def test_bad_map_fails_with_witness():
    m = bad_theta()
    assert m.certify() == FAILED
    assert "relation" in m.witness.label
    assert m.witness.normal_form != "0"


def _relation_images(m):
    pres = BA1.presentation
    for rel in pres.relations:
        img = m.apply_element(rel)
        yield Element({k[0]: c for k, c in img.terms.items()})


def test_certificate_sound_against_oracle():
    # a verified certificate means each relation image lies in the ideal
    assert THETA.certify() == VERIFIED
    for e in _relation_images(THETA):
        assert e.is_zero() or in_truncated_ideal(BA1.presentation, e, 3)
    # and the failing map has an image outside it
    outside = [e for e in _relation_images(bad_theta())
               if not e.is_zero() and not in_truncated_ideal(BA1.presentation, e, 3)]
    assert outside


def test_equal_morphisms_is_an_equivalence():
    f = THETA
    g = THETA.with_images(dict(THETA.images), name="θ copy")
    h = compose(identity(BA1), THETA)
    assert equal_morphisms(f, f)
    assert equal_morphisms(f, g) and equal_morphisms(g, f)
    assert equal_morphisms(g, h) and equal_morphisms(f, h)
    assert not equal_morphisms(f, identity(BA1))
    assert not equal_morphisms(identity(BA1), f)


def test_opposite_morphism_certifies():
    op = THETA.opposite()
    assert op.source == (Bo,)
    assert op.certify() == VERIFIED
