"""The ten acceptance criteria, one test each; a PASS/FAIL line per criterion is printed at the end."""
import functools
import json
import re
from pathlib import Path

import pytest

from hgsys.cartan import A1, A2, A1xA1, BUILTIN_DATA, heisenberg_datum, weyl_datum
from hgsys.cli import main
from hgsys.constructions import (BUNDLE_MAPS, build_sridharan, check_sridharan_match, classical_limit, embed_uhat,
                                 kashiwara_lie_datum, kashiwara_presentation, mutually_reducing,
                                 uhat_presentation, uprime_presentation, uq_presentation)
from hgsys.engine import CERTAIN, CONFLUENT, Element, graded_dimension
from hgsys.maps import VERIFIED, equal_morphisms, identity
from hgsys.mutations import run_mutation_harness
from hgsys.oracle import bruteforce_dimension
from hgsys.verifier import (FAIL, PASS, check_bundle_comodules, check_complete_system, check_counit_agreement,
                            check_galois_system, check_hopf, check_Hl_membership, check_Hr_membership,
                            check_membership_suite, check_torsor, check_Z_membership, compute_S_T)

import conftest
from conftest import CTX, B, hopf, kashiwara, sridharan

DATA = ["A1", "A1xA1", "A2"]
SUITES = Path(__file__).resolve().parent.parent / "suites"


def criterion(n, title):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*a, **k):
            conftest.ACCEPTANCE[n] = ("FAIL", title)
            fn(*a, **k)
            conftest.ACCEPTANCE[n] = ("PASS", title)
        return wrapper
    return deco


def assert_pass(rep):
    assert rep.status == PASS, "\n".join(f"{r.label}: {r.witness}" for r in rep.results if r.status != PASS)


@criterion(1, "torsor axioms on B_q for A1, A1xA1, A2")
def test_torsor_suite():
    for name in DATA:
        tor = kashiwara(name).torsor
        rep = check_torsor(tor)
        assert_pass(rep)
        assert len(rep.results) == 6
        # μ kills the q-commutation relation and, for A2, the Serre relations, with certainty
        pres = tor.handle.presentation
        picked = [lab for lab in pres.labels if lab.startswith("ep1*f1") or lab.startswith("serre")]
        assert picked and (name != "A2" or sum(lab.startswith("serre") for lab in picked) == 4)
        for lab, rel in zip(pres.labels, pres.relations):
            if lab in picked:
                assert tor.mu.apply_element(rel).is_zero() == (True, CERTAIN), lab


@criterion(2, "Hopf axioms for U_q, U-hat, U-prime on A1, A1xA1, A2")
def test_hopf_suites():
    for name in DATA:
        for kind in ("Uq", "Uhat", "Uprime"):
            assert_pass(check_hopf(hopf(kind, name)))


@criterion(3, "Galois system for (U', U-hat, B, B^op), its mirror, and the complete-system compatibilities")
def test_galois_system():
    for name in DATA:
        b = kashiwara(name)
        for key in BUNDLE_MAPS:
            assert getattr(b, key).certificate == VERIFIED, key
        assert_pass(check_bundle_comodules(b))
        assert_pass(check_galois_system(b))
        assert_pass(check_galois_system(b.mirrored()))
        rep = check_complete_system(b)
        assert_pass(rep)
        assert sum("compat" in r.label or "∘" in r.label for r in rep.results) >= 8


@criterion(4, "U-hat embeds into U_q as a bialgebra map")
def test_embedding():
    for c in (A1, A1xA1, A2):
        emb = embed_uhat(c, CTX)
        assert emb.morphism.certificate == VERIFIED
        assert emb.coalgebra and all(r.equal and r.certainty == CERTAIN for r in emb.coalgebra)
        assert emb.counit and all(r.equal for r in emb.counit)


@criterion(5, "Sridharan torsors (Weyl and Heisenberg): torsor, Galois, complete; θ = Id, S = -Id")
def test_sridharan():
    for name in ("weyl", "heisenberg"):
        b = sridharan(name)
        assert_pass(check_torsor(b.torsor))
        assert_pass(check_galois_system(b))
        assert_pass(check_galois_system(b.mirrored()))
        assert_pass(check_complete_system(b))
        assert equal_morphisms(b.torsor.theta, identity(b.T))
        for S, src in ((b.S_T, b.T), (b.S_Z, b.Z)):
            for x in src.presentation.names:
                img = S.images[x]
                assert img.terms == {((x,),): -1}, (S.name, x)
        H = b.A
        for x in H.handle.presentation.names:
            assert H.antipode.images[x].terms == {((x,),): -1}


@criterion(6, "coinvariant membership on B_q(sl2) with three rejected controls")
def test_membership():
    b = kashiwara("A1")
    tor, T = b.torsor, b.T
    for g in T.presentation.names:
        z = compute_S_T(Element.gen(g), tor)
        assert check_Z_membership(z, tor, g).status == PASS, g
        assert check_counit_agreement(z, tor, g).status == PASS, g
    for g, u in b.gamma.images.items():
        assert check_Hl_membership(u, tor, g).status == PASS, g
    for g, u in b.delta.images.items():
        assert check_Hr_membership(u, tor, g).status == PASS, g
    rep = check_membership_suite(b)
    negatives = [r for r in rep.results if r.label.startswith("negative control")]
    assert len(negatives) == 3
    for r in negatives:
        assert r.status == PASS and r.witness is not None, r.label
    assert_pass(rep)


@criterion(7, "classical limit of B_q is the Sridharan algebra; U' and U-hat limits agree")
def test_classical_limit():
    for c in (A1, A2):
        data = kashiwara_lie_datum(c, CTX)
        res = check_sridharan_match(classical_limit(B(c.name), CTX), data.lie, data.cocycle, data.exprs, CTX)
        assert res.ok, res.failures
        assert all(data.cocycle(f"e{i}", f"f{j}") == (i == j) for i in c.indices for j in c.indices)
    for name in DATA:
        c = BUILTIN_DATA[name]
        up = {**{f"ep{i}": f"e{i}" for i in c.indices}, **{f"fp{i}": f"f{i}" for i in c.indices}}
        uh = {f"eh{i}": f"e{i}" for i in c.indices}
        a = classical_limit(hopf("Uprime", name).handle, CTX, rename=up)
        h = classical_limit(hopf("Uhat", name).handle, CTX, rename=uh)
        ok, bad = mutually_reducing(a, h)
        assert ok, bad


@criterion(8, "rewriting dimensions equal linear-algebra dimensions for every built-in algebra")
def test_oracle_equivalence():
    tops = {"A1": 4, "A1xA1": 3, "A2": 3}
    for name, top in tops.items():
        c = BUILTIN_DATA[name]
        for make in (uq_presentation, uhat_presentation, uprime_presentation, kashiwara_presentation):
            pres = make(c)
            s = CTX.complete(pres)
            assert s.status == CONFLUENT
            for d in range(top + 1):
                assert graded_dimension(s, d) == bruteforce_dimension(pres, d), (pres.name, d)
    for datum in (weyl_datum, heisenberg_datum):
        lie, coc = datum()
        h = build_sridharan(lie, coc, CTX)
        for d in range(5):
            assert graded_dimension(h.system, d) == bruteforce_dimension(h.presentation, d)
    # recomputed from scratch, not read back from the assertions above
    uq = uq_presentation(A1)
    assert bruteforce_dimension(uq, 2) == 14
    assert graded_dimension(CTX.complete(uq), 2) == 14


@criterion(9, "20 random single-token mutations per built-in bundle are each caught")
def test_mutation_sensitivity():
    bundles = [kashiwara(n) for n in DATA] + [sridharan("weyl"), sridharan("heisenberg")]
    for b in bundles:
        outcomes = run_mutation_harness(b, count=20, seed=0)
        assert len(outcomes) == 20, b.name
        silent = [o.mutation.describe() for o in outcomes if o.status != FAIL]
        assert not silent, (b.name, silent)


EXIT = {"custom_quantum_plane": 0, "kashiwara_A1": 0, "kashiwara_A1xA1": 0, "kashiwara_A2": 0,
        "sridharan_weyl": 0, "sridharan_heisenberg": 0, "uq_hopf_A2": 0,
        "kashiwara_A1_mutated_theta": 1, "kashiwara_A2_bound2": 2, "kashiwara_A2_tiny_budget": 3}


def _strip_timing(text):
    return re.sub(r'"millis": [0-9.eE+-]+', '"millis": 0', text)


@criterion(10, "byte-identical reports modulo timing and exit codes 0/1/2/3 on the suite matrix")
def test_determinism_and_exit_codes(tmp_path):
    assert {p.stem for p in SUITES.glob("*.json")} == set(EXIT)
    for name, want in sorted(EXIT.items()):
        texts = []
        for k, extra in enumerate((["--no-cache"], ["--cache-dir", str(tmp_path / "c")],
                                   ["--cache-dir", str(tmp_path / "c")])):
            out = tmp_path / f"{name}.{k}.json"
            code = main(["run", str(SUITES / f"{name}.json"), "--report", str(out), *extra])
            assert code == want, (name, code)
            texts.append(_strip_timing(out.read_text()))
        assert texts[0] == texts[1] == texts[2], name
        assert json.loads(texts[0])["exit_code"] == want
