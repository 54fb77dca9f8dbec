import pytest

from hgsys.mutations import (INVERT_Q, NEGATE, SWAP_TORAL, apply_mutation, mutate_image, mutation_sites,
                             run_mutation_harness)
from hgsys.verifier import FAIL, check_bundle

from conftest import kashiwara, sridharan


def test_sites_cover_all_kinds():
    sites = mutation_sites(kashiwara("A1"))
    kinds = {m.kind for m in sites}
    assert kinds == {NEGATE, INVERT_Q, SWAP_TORAL}
    assert len({(m.map_key, m.generator, m.term, m.kind, m.leg, m.pos) for m in sites}) == len(sites)
    assert all(m.describe() for m in sites)


def test_mutation_changes_the_image():
    b = kashiwara("A1")
    for m in mutation_sites(b)[:40]:
        img = b.maps()[m.map_key].images[m.generator]
        assert mutate_image(img, m) != img, m.describe()


def test_harness_is_deterministic():
    b = kashiwara("A1")
    a = [o.mutation for o in run_mutation_harness(b, count=5, seed=11)]
    c = [o.mutation for o in run_mutation_harness(b, count=5, seed=11)]
    assert a == c


@pytest.mark.parametrize("name", ["weyl", "heisenberg"])
def test_every_sridharan_mutation_is_caught(name):
    b = sridharan(name)
    for m in mutation_sites(b):
        rep = check_bundle(apply_mutation(b, m))
        assert rep.status == FAIL, m.describe()
