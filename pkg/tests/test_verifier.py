import dataclasses
import json

import pytest

from hgsys.cache import Context
from hgsys.cartan import A1, A2
from hgsys.constructions import kashiwara_torsor, tensor
from hgsys.engine import Element
from hgsys.errors import SignatureMismatch
from hgsys.maps import TensorElement, identity
from hgsys.scalars import qpow
from hgsys.verifier import (FAIL, INCONCLUSIVE_STATUS, PASS, CheckReport, CheckResult, Options, block_shape_ok,
                            check_bundle, check_comodule, check_complete_system, check_Hr_membership, check_counit_agreement, check_galois_system,
                            check_Hl_membership, check_hopf, check_membership_suite, check_torsor,
                            check_Z_membership, compute_S_T, random_elements, sample_check, verify_basis, worst)

from conftest import B, hopf, kashiwara, sridharan


def test_worst_status():
    assert worst([]) == PASS
    assert worst([PASS, INCONCLUSIVE_STATUS]) == INCONCLUSIVE_STATUS
    assert worst([INCONCLUSIVE_STATUS, FAIL, PASS]) == FAIL


def test_report_json_shape():
    rep = check_hopf(hopf("Uprime", "A1"))
    doc = rep.to_json(timing=False)
    assert doc["report_version"] == 1 and doc["status"] == PASS
    assert all(r["millis"] == 0 for r in doc["results"])
    assert all(r["paper_anchor"] for r in doc["results"])
    json.dumps(doc)
    assert "pass" in rep.summary()


@pytest.mark.parametrize("kind", ["Uq", "Uhat", "Uprime"])
def test_hopf_a1(kind):
    assert check_hopf(hopf(kind, "A1")).status == PASS


def test_kashiwara_torsor_a1():
    rep = check_torsor(kashiwara("A1").torsor)
    assert rep.status == PASS
    assert len(rep.results) == 6


def test_torsor_without_theta_fails():
    tor = kashiwara("A1").torsor
    rep = check_torsor(dataclasses.replace(tor, theta=identity(tor.handle)))
    (bad,) = rep.failures()
    assert bad.label.startswith("(e)") and bad.witness is not None


def test_sridharan_torsor_has_trivial_theta_and_negative_antipode():
    for name in ("weyl", "heisenberg"):
        b = sridharan(name)
        assert check_torsor(b.torsor).status == PASS
        T = b.T
        for x in b.meta["lie"].basis:
            assert b.torsor.theta.images[x] == tensor((T,), (1, x))
            assert b.S_T.images[x].terms == {((x,),): -qpow(0)}


def test_comodules_and_galois():
    b = kashiwara("A1")
    assert check_comodule(b.T, b.alpha_T, b.A, "left").status == PASS
    assert check_comodule(b.T, b.beta_T, b.B, "right").status == PASS
    assert check_galois_system(b).status == PASS
    assert check_galois_system(b.mirrored()).status == PASS


def test_wrong_side_coaction_fails():
    b = kashiwara("A1")
    # beta_T lands in T ⊗ B, which is not a left comodule structure
    with pytest.raises(SignatureMismatch):
        check_comodule(b.T, b.beta_T, b.B, "left")


def test_membership_of_antipode_images():
    b = kashiwara("A1")
    tor = b.torsor
    for g in b.T.presentation.names:
        z = compute_S_T(Element.gen(g), tor)
        assert check_Z_membership(z, tor).status == PASS
        assert check_counit_agreement(z, tor).status == PASS


def test_membership_negative_examples():
    b = kashiwara("A1")
    tor, T = b.torsor, b.T
    x = TensorElement.pure((T, T.op()), ["ep1", ""])
    r = check_Hl_membership(x, tor)
    assert r.status == FAIL and r.witness is not None
    z = TensorElement.pure((T.op(), T, T.op()), ["ep1", "", ""])
    assert check_Z_membership(z, tor).status == FAIL


def test_membership_suite_counts():
    rep = check_membership_suite(kashiwara("A1"))
    assert rep.status == PASS
    assert sum("negative control" in r.label for r in rep.results) == 3
    # γ and δ images are checked for the Kashiwara bundle but not Sridharan
    assert any("∈ H_l" in r.label for r in rep.results)
    srep = check_membership_suite(sridharan("weyl"))
    assert srep.status == PASS
    assert not any("∈ H_l" in r.label and "negative" not in r.label for r in srep.results)


def test_low_bound_is_inconclusive():
    ctx = Context(degree_bound=2, strict=False)
    tor = kashiwara_torsor(A2, ctx)
    rep = check_torsor(tor)
    assert rep.status == INCONCLUSIVE_STATUS
    assert verify_basis(tor.handle, 3).status == INCONCLUSIVE_STATUS


def test_basis_shape():
    assert block_shape_ok(("t1", "f1", "ep1"), {"t1"}, {"f1"}, {"ep1"})
    assert not block_shape_ok(("ep1", "f1"), {"t1"}, {"f1"}, {"ep1"})
    r = verify_basis(A1, 4)
    assert r.status == PASS and "dimension" in r.note


def test_sampling_cross_check_agrees():
    H = hopf("Uq", "A1")
    xs = random_elements(H.handle, 4, seed=3)
    assert len(xs) == 4
    from hgsys.maps import compose
    s = sample_check("antipode twice", "", compose(H.antipode.opposite(), H.antipode),
                     compose(H.antipode.opposite(), H.antipode), 4, seed=1)
    assert s is None or s.status == PASS
    assert check_bundle(kashiwara("A1"), Options(samples=3, seed=7)).status == PASS


def test_report_extend_merges_conventions():
    a = CheckReport("a", {}, [CheckResult("x", "", PASS)], conventions=["c1"])
    b = CheckReport("b", {}, [CheckResult("y", "", FAIL)], conventions=["c1", "c2"])
    a.extend(b)
    assert a.conventions == ["c1", "c2"] and a.status == FAIL and not a


def test_listed_membership_examples():
    b = kashiwara("A1")
    tor, T = b.torsor, b.T
    Tp = T.op()
    assert compute_S_T(Element.gen("t1"), tor) == tensor((Tp, T, Tp), (1, "t1", "t1inv", "t1"))
    assert compute_S_T(Element.scalar(1), tor) == tensor((Tp, T, Tp), (1, "", "", ""))
    assert check_Hl_membership(tensor((T, Tp), (1, "", "")), tor).status == PASS
    assert check_Hr_membership(tensor((Tp, T), (1, "", "")), tor).status == PASS
    assert check_Hr_membership(b.delta.images["eh1"], tor).status == PASS
    assert check_Hr_membership(tensor((Tp, T), (1, "", "ep1")), tor).status == FAIL
    assert check_Z_membership(tensor((Tp, T, Tp), (1, "", "", "")), tor).status == PASS
    # S_T(e') has three terms carrying q^{±2}
    z = compute_S_T(Element.gen("ep1"), tor)
    assert len(z.terms) == 3


def test_trivial_theta_breaks_a_compatibility():
    b = kashiwara("A1")
    ident = identity(b.T)
    S = b.S_T.with_images(dict(ident.images), name="S=Id")
    S.certify()
    rep = check_complete_system(b.replace_map("S_T", S))
    assert rep.status == FAIL
    assert all(r.witness is not None for r in rep.failures())
