"""Single-token perturbations of bundle maps, used to show the suites have teeth."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .constructions import GaloisBundle
from .maps import Morphism, TensorElement, render_word
from .scalars import qpow
from .verifier import FAIL, CheckReport, Options, check_bundle

NEGATE = "negate"
SWAP_TORAL = "swap_toral"
INVERT_Q = "invert_q"


@dataclass(frozen=True)
class Mutation:
    map_key: str
    generator: str
    term: tuple    # key of the tensor term being changed
    kind: str
    leg: int = -1  # for swap_toral: which leg, and position inside the word
    pos: int = -1

    def describe(self) -> str:
        legs = "⊗".join(f"({render_word(w)})" for w in self.term)
        where = f" at leg {self.leg + 1}, letter {self.pos + 1}" if self.kind == SWAP_TORAL else ""
        return f"{self.kind} on {self.map_key}({self.generator}) term {legs}{where}"


def _toral_swap(g: str) -> str | None:
    if g.startswith("t") and g[1:].isdigit():
        return g + "inv"
    if g.startswith("t") and g.endswith("inv") and g[1:-3].isdigit():
        return g[:-3]
    return None


def mutation_sites(bundle: GaloisBundle, keys=None) -> list[Mutation]:
    maps = bundle.maps()
    out = []
    for key in sorted(maps) if keys is None else keys:
        m = maps[key]
        for g in m.source_handle.presentation.names:
            img = m.images[g]
            for term, c in img.sorted_terms():
                out.append(Mutation(key, g, term, NEGATE))
                mono = c.monomial()
                if mono is not None and mono[1] != 0:
                    out.append(Mutation(key, g, term, INVERT_Q))
                for li, w in enumerate(term):
                    for pi, letter in enumerate(w):
                        if _toral_swap(letter):
                            out.append(Mutation(key, g, term, SWAP_TORAL, li, pi))
    return out


def mutate_image(img: TensorElement, mut: Mutation) -> TensorElement:
    terms = dict(img.terms)
    c = terms.pop(mut.term)
    if mut.kind == NEGATE:
        terms[mut.term] = -c
    elif mut.kind == INVERT_Q:
        coeff, k = c.monomial()
        terms[mut.term] = qpow(-k) * coeff
    elif mut.kind == SWAP_TORAL:
        w = list(mut.term[mut.leg])
        w[mut.pos] = _toral_swap(w[mut.pos])
        key = mut.term[:mut.leg] + (tuple(w),) + mut.term[mut.leg + 1:]
        terms[key] = terms[key] + c if key in terms else c
    else:
        raise ValueError(mut.kind)
    return TensorElement(img.sig, terms)


def apply_mutation(bundle: GaloisBundle, mut: Mutation) -> GaloisBundle:
    m: Morphism = bundle.maps()[mut.map_key]
    images = dict(m.images)
    images[mut.generator] = mutate_image(images[mut.generator], mut)
    new = m.with_images(images, name=m.name + "*")
    new.certify()
    return bundle.replace_map(mut.map_key, new)


@dataclass
class MutationOutcome:
    mutation: Mutation
    status: str
    caught_by: str

    @property
    def caught(self) -> bool:
        return self.status == FAIL


def run_mutation_harness(bundle: GaloisBundle, count: int = 20, seed: int = 0,
                         opts: Options | None = None) -> list[MutationOutcome]:
    rng = random.Random(seed)
    sites = mutation_sites(bundle)
    chosen = rng.sample(sites, min(count, len(sites)))
    out = []
    for mut in chosen:
        rep: CheckReport = check_bundle(apply_mutation(bundle, mut), opts)
        fails = rep.failures()
        out.append(MutationOutcome(mut, rep.status, fails[0].label if fails else ""))
    return out
