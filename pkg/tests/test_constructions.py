from fractions import Fraction

import pytest

from hgsys.cartan import A1, A2, A1xA1, CartanDatum, CocycleSpec, LieDatum, heisenberg, weyl_datum
from hgsys.constructions import (W, build_sridharan, check_sridharan_match, classical_limit, embed_uhat,
                                 kashiwara_lie_datum, mutually_reducing, q_binomial, serre_relation,
                                 sridharan_presentation, tensor)
from hgsys.engine import Element
from hgsys.errors import CocycleError, PoleError, ValidationError
from hgsys.maps import VERIFIED
from hgsys.scalars import ONE, Q, q_integer, qpow
from hgsys.verifier import FAIL, PASS, check_hopf

from conftest import CTX, B, hopf, kashiwara


def nf(h, text):
    return h.system.normal_form(W(text))


def test_kashiwara_commutation():
    b = B("A1")
    assert nf(b, "ep1 f1") == W("f1 ep1", qpow(2)) + Element.scalar(1)
    assert nf(b, "t1 ep1 t1inv") == W("ep1", qpow(2))
    assert nf(b, "t1 f1 t1inv") == W("f1", qpow(-2))
    b2 = B("A2")
    # off-diagonal: q^{a_12} = q^-1
    assert nf(b2, "ep1 f2") == W("f2 ep1", qpow(-1))
    assert nf(b2, "t2 ep1 t2inv") == W("ep1", qpow(-1))


def test_uq_commutator():
    u = hopf("Uq", "A1").handle
    lhs = W("e1 f1") - W("f1 e1")
    want = (W("t1") - W("t1inv")).scale((Q - Q.inverse()).inverse())
    assert u.system.normal_form(lhs - want).is_zero()


def test_serre_relations():
    assert q_binomial(2, 1) == q_integer(2)
    assert q_binomial(4, 2) == q_integer(4) * q_integer(3) / q_integer(2)
    r = serre_relation("ep1", "ep2", -1, 1)
    assert r == W("ep1 ep1 ep2") - W("ep1 ep2 ep1", q_integer(2)) + W("ep2 ep1 ep1")
    b2 = B("A2")
    assert b2.system.normal_form(r).is_zero()
    # commuting simple roots in A1xA1
    b11 = B("A1xA1")
    assert nf(b11, "ep1 ep2") - nf(b11, "ep2 ep1") == Element()


def test_cartan_validation():
    with pytest.raises(ValidationError):
        CartanDatum(((2, -1), (-2, 2)), (1, 1))
    CartanDatum(((2, -1), (-2, 2)), (2, 1), "B2")  # symmetrizable with d = (2, 1)
    with pytest.raises(ValidationError):
        CartanDatum(((2, -1, -1), (-2, 2, -1), (-1, -1, 2)), (1, 1, 1))
    with pytest.raises(ValidationError):
        CartanDatum(((2, 1), (1, 2)), (1, 1))
    with pytest.raises(ValidationError):
        CartanDatum(((2, 0), (-1, 2)), (1, 1))


def test_lie_datum_validation():
    with pytest.raises(ValidationError):
        LieDatum(["x", "y", "z"], {("x", "y"): {"x": 1}, ("y", "z"): {"y": 1}, ("x", "z"): {"z": 1}})
    h = heisenberg()
    assert h.bracket("y", "x") == {"z": Fraction(-1)}


def test_cocycle_error_names_triple():
    lie = LieDatum(["x", "y", "z"], {("x", "y"): {"x": 1}})
    # c([x,y], z) + ... = c(x, z) must vanish
    with pytest.raises(CocycleError) as info:
        CocycleSpec(lie, {("x", "z"): 1})
    assert info.value.triple == ("x", "y", "z")
    with pytest.raises(ValidationError):
        CocycleSpec(lie, {("x", "x"): 1})


def test_sridharan_relations():
    lie, c = weyl_datum()
    h = build_sridharan(lie, c, CTX, "weyl")
    # x y - y x = c(x, y) = 1
    assert h.system.normal_form(W("x y") - W("y x") - Element.scalar(1)).is_zero()
    assert not h.system.normal_form(W("x y") - W("y x")).is_zero()
    with pytest.raises(ValidationError, match="different Lie algebra"):
        sridharan_presentation(lie, CocycleSpec(heisenberg(), {("x", "y"): 1}))
    lie2 = LieDatum(["x", "y", "z"], {("x", "y"): {"x": 1}})
    with pytest.raises(CocycleError):
        sridharan_presentation(lie2, CocycleSpec(lie2, {("x", "z"): 1}, check=False))


def literal_antipode(H, kind):
    A = H.handle
    imgs = dict(H.antipode.images)
    for i in (1,):
        if kind == "Uhat":
            imgs[f"f{i}"] = tensor((A.op(),), (-1, f"f{i}"))
        else:
            imgs[f"fp{i}"] = tensor((A.op(),), (1, f"t{i}inv fp{i}"))
    m = H.antipode.with_images(imgs, name="S literal")
    m.certify()
    return m


@pytest.mark.parametrize("kind", ["Uhat", "Uprime"])
def test_literal_antipode_formulas_break_the_antipode_law(kind):
    import dataclasses
    H = hopf(kind, "A1")
    assert check_hopf(H).status == PASS
    bad = dataclasses.replace(H, antipode=literal_antipode(H, kind))
    rep = check_hopf(bad)
    assert rep.status == FAIL
    assert any("antipode" in r.label for r in rep.failures())


def test_embedding_is_a_bialgebra_map():
    for c in (A1, A1xA1, A2):
        emb = embed_uhat(c, CTX)
        assert emb.morphism.certificate == VERIFIED
        assert all(r.equal for r in emb.coalgebra + emb.counit)


def test_classical_limit_of_uq_has_a_pole():
    with pytest.raises(PoleError, match="e1\\*f1"):
        classical_limit(hopf("Uq", "A1").handle, CTX)


def test_classical_limits_of_u_prime_and_u_hat_agree():
    a = classical_limit(hopf("Uprime", "A1").handle, CTX, rename={"ep1": "e1", "fp1": "f1"})
    b = classical_limit(hopf("Uhat", "A1").handle, CTX, rename={"eh1": "e1"})
    ok, bad = mutually_reducing(a, b)
    assert ok, bad
    # both are the polynomial ring in e, f
    assert a.system.normal_form(W("f1 e1") - W("e1 f1")).is_zero()


def test_classical_kashiwara_is_weyl_like():
    cl = classical_limit(B("A1"), CTX)
    assert cl.system.normal_form(W("ep1 f1")) == W("f1 ep1") + Element.scalar(1)


def test_lie_datum_of_a2():
    data = kashiwara_lie_datum(A2, CTX)
    assert data.lie.basis == ["e1", "e2", "e12", "f1", "f2", "f12"]
    assert data.lie.bracket("e1", "e2") == {"e12": Fraction(1)}
    assert data.lie.bracket("e1", "e12") == {}
    assert data.cocycle("e1", "f1") == 1 and data.cocycle("e12", "f12") == 0


@pytest.mark.parametrize("c", [A1, A2])
@pytest.mark.parametrize("with_cartan", [False, True])
def test_sridharan_match(c, with_cartan):
    data = kashiwara_lie_datum(c, CTX, with_cartan=with_cartan)
    cl = classical_limit(B(c.name), CTX, with_cartan=with_cartan)
    res = check_sridharan_match(cl, data.lie, data.cocycle, data.exprs, CTX)
    assert res.ok, res.failures


@pytest.mark.parametrize("scale", [0, 2])
def test_sridharan_match_rejects_wrong_cocycle(scale):
    data = kashiwara_lie_datum(A1, CTX, cocycle_scale=scale)
    cl = classical_limit(B("A1"), CTX)
    res = check_sridharan_match(cl, data.lie, data.cocycle, data.exprs, CTX)
    assert not res.ok and res.failures


def test_bundle_shapes():
    b = kashiwara("A1")
    assert b.T.same_space(b.Z) and b.Z.opposite
    m = b.mirrored()
    assert m.A is b.B and m.gamma is b.delta and m.torsor is None
    assert set(b.all_morphisms()) >= {"gamma", "mu", "coproduct_A", "antipode_B"}
    assert ONE == b.torsor.theta.images["t1"].terms[(("t1",),)]


def test_listed_factory_examples():
    uh = hopf("Uhat", "A1")
    h = uh.handle
    assert h.system.normal_form(W("eh1 f1") - W("f1 eh1") - W("t1") + W("t1inv")).is_zero()
    assert uh.coproduct.images["f1"] == tensor((h, h), (1, "f1", "t1inv"), (1, "", "f1"))
    assert uh.antipode.images["eh1"] == tensor((h.op(),), (-1, "t1inv eh1"))
    uq = hopf("Uq", "A1")
    assert uq.coproduct.images["t1"] == tensor((uq.handle,) * 2, (1, "t1", "t1"))
    assert uq.counit.images["e1"].terms == {} and uq.counit.images["t1"] == tensor((), (1,))
    up = hopf("Uprime", "A1")
    assert nf(up.handle, "ep1 fp1") == W("fp1 ep1", qpow(-2))
    assert up.counit.images["fp1"].terms == {}
    b = B("A1")
    # t f t^-1 = q^-2 f; toral letters come first in normal words
    assert nf(b, "f1 t1") == W("t1 f1", qpow(2))
