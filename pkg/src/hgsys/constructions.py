"""Factories for the quantum algebras, the Kashiwara and Sridharan bundles, and classical limits.

Generator names are fixed: ``e1, f1, t1, t1inv`` for U_q, ``eh1`` for the
hatted e, ``ep1, fp1`` for the primed letters.  The Kashiwara algebra uses
``ep1, f1, t1, t1inv``.  The toral letter t_i stands for q_i^{h_i}, so it
conjugates a generator of weight alpha_j by q^{d_i a_ij}.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from flint import fmpq, fmpq_mat

from .cache import Context
from .cartan import CartanDatum, CocycleSpec, LieDatum
from .engine import Element, Generator, Presentation, words_up_to
from .errors import InconclusiveError, PoleError, ValidationError
from .maps import (FAILED, INCONCLUSIVE, VERIFIED, AlgebraHandle, Morphism, TensorElement,
                   Witness, define_morphism, identity)
from .scalars import ONE, ZERO, Scalar, as_scalar, q_factorial, qpow

# ---------------------------------------------------------------------------
# containers


@dataclass
class HopfAlgebra:
    handle: AlgebraHandle
    coproduct: Morphism
    antipode: Morphism  # into handle.op()
    counit: Morphism    # into the empty signature k

    @property
    def name(self):
        return self.handle.name

    def maps(self) -> dict:
        return {"coproduct": self.coproduct, "antipode": self.antipode, "counit": self.counit}


@dataclass
class Torsor:
    handle: AlgebraHandle
    mu: Morphism     # T -> T ⊗ T^op ⊗ T
    theta: Morphism  # T -> T


BUNDLE_MAPS = ("alpha_T", "beta_T", "alpha_Z", "beta_Z", "gamma", "delta", "S_T", "S_Z")


@dataclass
class GaloisBundle:
    """(A, B, T, Z) with coactions alpha (left) and beta (right) on T and Z."""

    name: str
    A: HopfAlgebra
    B: HopfAlgebra
    T: AlgebraHandle
    Z: AlgebraHandle
    alpha_T: Morphism  # T -> A ⊗ T
    beta_T: Morphism   # T -> T ⊗ B
    alpha_Z: Morphism  # Z -> B ⊗ Z
    beta_Z: Morphism   # Z -> Z ⊗ A
    gamma: Morphism    # A -> T ⊗ Z
    delta: Morphism    # B -> Z ⊗ T
    S_T: Morphism      # T -> Z^op
    S_Z: Morphism      # Z -> T^op
    torsor: Torsor | None = None
    meta: dict = field(default_factory=dict)

    def maps(self) -> dict:
        out = {k: getattr(self, k) for k in BUNDLE_MAPS}
        if self.torsor is not None:
            out["mu"] = self.torsor.mu
            out["theta"] = self.torsor.theta
        return out

    def all_morphisms(self) -> dict:
        out = self.maps()
        for tag, h in (("A", self.A), ("B", self.B)):
            for k, m in h.maps().items():
                out[f"{k}_{tag}"] = m
        return out

    def mirrored(self) -> "GaloisBundle":
        return GaloisBundle(self.name + "/mirror", self.B, self.A, self.Z, self.T,
                            alpha_T=self.alpha_Z, beta_T=self.beta_Z,
                            alpha_Z=self.alpha_T, beta_Z=self.beta_T,
                            gamma=self.delta, delta=self.gamma,
                            S_T=self.S_Z, S_Z=self.S_T, torsor=None, meta=dict(self.meta))

    def replace_map(self, key: str, m: Morphism) -> "GaloisBundle":
        if key in BUNDLE_MAPS:
            return dataclasses.replace(self, **{key: m})
        if key in ("mu", "theta"):
            if self.torsor is None:
                raise KeyError(key)
            return dataclasses.replace(self, torsor=dataclasses.replace(self.torsor, **{key: m}))
        for tag in ("A", "B"):
            for k in ("coproduct", "antipode", "counit"):
                if key == f"{k}_{tag}":
                    h = dataclasses.replace(getattr(self, tag), **{k: m})
                    return dataclasses.replace(self, **{tag: h})
        raise KeyError(key)


# ---------------------------------------------------------------------------
# helpers


def tensor(sig, *terms) -> TensorElement:
    """tensor(sig, (coeff, leg0, leg1, ...), ...) with legs as space-separated words ("" is 1)."""
    acc = TensorElement.zero(sig)
    for coeff, *legs in terms:
        acc = acc + TensorElement.pure(sig, list(legs), as_scalar(coeff))
    return acc


def W(text: str, coeff=ONE) -> Element:
    return Element.word(tuple(text.split()), coeff)


def _certified(name, source, target, images, ctx: Context) -> Morphism:
    return define_morphism(name, source, target, images, strict=ctx.strict)


def t_(i):
    return f"t{i}"


def tinv(i):
    return f"t{i}inv"


def q_binomial(n: int, k: int, d: int = 1) -> Scalar:
    return q_factorial(n, d) / (q_factorial(k, d) * q_factorial(n - k, d))


def serre_relation(x: str, y: str, aij: int, d: int) -> Element:
    """Sum_k (-1)^k [n choose k]_{q^d} x^k y x^(n-k) with n = 1 - aij (divided powers cleared)."""
    n = 1 - aij
    rel = Element()
    for k in range(n + 1):
        w = (x,) * k + (y,) + (x,) * (n - k)
        c = q_binomial(n, k, d)
        rel = rel + Element.word(w, -c if k % 2 else c)
    return rel


@dataclass(frozen=True)
class Letters:
    """Names of the e-type and f-type letters of a quantum algebra."""

    e: str
    f: str

    def E(self, i):
        return f"{self.e}{i}"

    def F(self, i):
        return f"{self.f}{i}"


def _toral_relations(c: CartanDatum):
    rels, labels = [], []
    for i in c.indices:
        rels += [W(f"{t_(i)} {tinv(i)}") - Element.scalar(1), W(f"{tinv(i)} {t_(i)}") - Element.scalar(1)]
        labels += [f"t{i}*t{i}inv=1", f"t{i}inv*t{i}=1"]
    for i in c.indices:
        for j in c.indices:
            if i < j:
                for a in (t_(i), tinv(i)):
                    for b in (t_(j), tinv(j)):
                        rels.append(W(f"{a} {b}") - W(f"{b} {a}"))
                        labels.append(f"[{a},{b}]=0")
    return rels, labels


def _weight_relations(c: CartanDatum, L: Letters):
    """t_j X t_j^-1 = q^{±d_j a_ji} X for X = E_i (+) and F_i (-)."""
    rels, labels = [], []
    for j in c.indices:
        for i in c.indices:
            k = c.d(j) * c.a(j, i)
            for x, s in ((L.E(i), 1), (L.F(i), -1)):
                rels.append(W(f"{t_(j)} {x}") - W(f"{x} {t_(j)}", qpow(s * k)))
                labels.append(f"t{j}*{x}")
                rels.append(W(f"{tinv(j)} {x}") - W(f"{x} {tinv(j)}", qpow(-s * k)))
                labels.append(f"t{j}inv*{x}")
    return rels, labels


def _serre_relations(c: CartanDatum, letters: Sequence[str], tag: str):
    rels, labels = [], []
    for i in c.indices:
        for j in c.indices:
            if i == j or (c.a(i, j) == 0 and i > j):
                continue
            rels.append(serre_relation(f"{letters}{i}", f"{letters}{j}", c.a(i, j), c.d(i)))
            labels.append(f"serre_{tag}({i},{j})")
    return rels, labels


def _precedence(c: CartanDatum, L: Letters):
    out = [L.E(i) for i in c.indices] + [L.F(i) for i in c.indices]
    for i in c.indices:
        out += [t_(i), tinv(i)]
    return out


def quantum_presentation(name: str, c: CartanDatum, L: Letters, ef_relation) -> Presentation:
    """Presentation on E_i, F_i, t_i^{±1} with the E-F block given by ef_relation(i, j)."""
    rels, labels = _toral_relations(c)
    r, l = _weight_relations(c, L)
    rels += r
    labels += l
    for i in c.indices:
        for j in c.indices:
            rels.append(ef_relation(i, j))
            labels.append(f"{L.E(i)}*{L.F(j)}")
    for letters, tag in ((L.e, L.e), (L.f, L.f)):
        r, l = _serre_relations(c, letters, tag)
        rels += r
        labels += l
    prec = _precedence(c, L)
    pres = Presentation(name, prec, rels, precedence=prec, labels=labels)
    pres.meta = {"cartan": c, "letters": L, "toral": [x for i in c.indices for x in (t_(i), tinv(i))]}
    return pres


def _label(prefix: str, c: CartanDatum) -> str:
    return f"{prefix}({c.label()})"


# ---------------------------------------------------------------------------
# quantum groups


def _hopf(handle: AlgebraHandle, c: CartanDatum, L: Letters, f_kind: str, ctx: Context) -> HopfAlgebra:
    """Delta(E) = E⊗1 + t⊗E; Delta(F) = F⊗t^-1 + 1⊗F ("std") or F⊗1 + t⊗F ("prime")."""
    A = handle
    AA = (A, A)
    dl, an, co = {}, {}, {}
    for i in c.indices:
        E, F, t, ti = L.E(i), L.F(i), t_(i), tinv(i)
        dl[E] = tensor(AA, (1, E, ""), (1, t, E))
        dl[t] = tensor(AA, (1, t, t))
        dl[ti] = tensor(AA, (1, ti, ti))
        an[E] = tensor((A.op(),), (-1, f"{ti} {E}"))
        an[t] = tensor((A.op(),), (1, ti))
        an[ti] = tensor((A.op(),), (1, t))
        if f_kind == "std":
            dl[F] = tensor(AA, (1, F, ti), (1, "", F))
            an[F] = tensor((A.op(),), (-1, f"{F} {t}"))
        else:
            dl[F] = tensor(AA, (1, F, ""), (1, t, F))
            an[F] = tensor((A.op(),), (-1, f"{ti} {F}"))
        for x in (E, F):
            co[x] = TensorElement.zero(())
        co[t] = tensor((), (1,))
        co[ti] = tensor((), (1,))
    n = handle.name
    return HopfAlgebra(
        handle,
        _certified(f"Δ[{n}]", A, AA, dl, ctx),
        _certified(f"S[{n}]", A, (A.op(),), an, ctx),
        _certified(f"ε[{n}]", A, (), co, ctx),
    )


def uq_presentation(c: CartanDatum) -> Presentation:
    L = Letters("e", "f")

    def ef(i, j):
        rel = W(f"e{i} f{j}") - W(f"f{j} e{i}")
        if i == j:
            qi = qpow(c.d(i))
            rel = rel - (W(t_(i)) - W(tinv(i))).scale((qi - qi.inverse()).inverse())
        return rel

    return quantum_presentation(_label("Uq", c), c, L, ef)


def uhat_presentation(c: CartanDatum) -> Presentation:
    L = Letters("eh", "f")

    def ef(i, j):
        rel = W(f"eh{i} f{j}") - W(f"f{j} eh{i}")
        if i == j:
            rel = rel - (W(t_(i)) - W(tinv(i)))
        return rel

    return quantum_presentation(_label("Uhat", c), c, L, ef)


def uprime_presentation(c: CartanDatum) -> Presentation:
    L = Letters("ep", "fp")

    def ef(i, j):
        return W(f"ep{i} fp{j}") - W(f"fp{j} ep{i}", qpow(-c.d(i) * c.a(i, j)))

    return quantum_presentation(_label("Uprime", c), c, L, ef)


def kashiwara_presentation(c: CartanDatum) -> Presentation:
    L = Letters("ep", "f")

    def ef(i, j):
        rel = W(f"ep{i} f{j}") - W(f"f{j} ep{i}", qpow(c.d(i) * c.a(i, j)))
        if i == j:
            rel = rel - Element.scalar(1)
        return rel

    return quantum_presentation(_label("B", c), c, L, ef)


def _handle(pres: Presentation, ctx: Context) -> AlgebraHandle:
    return AlgebraHandle(pres.name, ctx.complete(pres))


def build_Uq(c: CartanDatum, ctx: Context | None = None) -> HopfAlgebra:
    ctx = ctx or Context()
    h = _handle(uq_presentation(c), ctx)
    return _hopf(h, c, Letters("e", "f"), "std", ctx)


def build_Uhat(c: CartanDatum, ctx: Context | None = None) -> HopfAlgebra:
    ctx = ctx or Context()
    h = _handle(uhat_presentation(c), ctx)
    return _hopf(h, c, Letters("eh", "f"), "std", ctx)


def build_Uprime(c: CartanDatum, ctx: Context | None = None) -> HopfAlgebra:
    ctx = ctx or Context()
    h = _handle(uprime_presentation(c), ctx)
    return _hopf(h, c, Letters("ep", "fp"), "prime", ctx)


def build_kashiwara(c: CartanDatum, ctx: Context | None = None) -> AlgebraHandle:
    ctx = ctx or Context()
    return _handle(kashiwara_presentation(c), ctx)


@dataclass
class Embedding:
    morphism: Morphism            # Uhat -> Uq
    coalgebra: list               # Comparison records for Δ∘ι vs (ι⊗ι)∘Δ̂
    counit: list                  # Comparison records for ε∘ι vs ε̂
    source: HopfAlgebra
    target: HopfAlgebra


def embed_uhat(c: CartanDatum, ctx: Context | None = None) -> Embedding:
    from .maps import compare_on_generators, compose, tensor_maps

    ctx = ctx or Context()
    U = build_Uq(c, ctx)
    H = build_Uhat(c, ctx)
    sig = (U.handle,)
    images = {}
    for i in c.indices:
        qi = qpow(c.d(i))
        images[f"eh{i}"] = tensor(sig, (qi - qi.inverse(), f"e{i}"))
        images[f"f{i}"] = tensor(sig, (1, f"f{i}"))
        images[t_(i)] = tensor(sig, (1, t_(i)))
        images[tinv(i)] = tensor(sig, (1, tinv(i)))
    iota = _certified("ι", H.handle, sig, images, ctx)
    lhs = compose(U.coproduct, iota)
    rhs = compose(tensor_maps([iota, iota], H.coproduct.target), H.coproduct)
    coal = compare_on_generators(lhs, rhs)
    cou = compare_on_generators(compose(U.counit, iota), H.counit)
    return Embedding(iota, coal, cou, H, U)


# ---------------------------------------------------------------------------
# Kashiwara torsor and bundle


def kashiwara_torsor(c: CartanDatum, ctx: Context | None = None, B: AlgebraHandle | None = None) -> Torsor:
    ctx = ctx or Context()
    B = B or build_kashiwara(c, ctx)
    sig = (B, B.op(), B)
    mu, th = {}, {}
    for i in c.indices:
        t, ti = t_(i), tinv(i)
        for x in (f"ep{i}", f"f{i}"):
            mu[x] = tensor(sig, (1, "", "", x), (-1, "", f"{x} {t}", ti), (1, x, t, ti))
            th[x] = tensor((B,), (1, f"{ti} {x} {t}"))
        mu[t] = tensor(sig, (1, t, ti, t))
        mu[ti] = tensor(sig, (1, ti, t, ti))
        th[t] = tensor((B,), (1, t))
        th[ti] = tensor((B,), (1, ti))
    return Torsor(B, _certified("μ_B", B, sig, mu, ctx), _certified("θ_B", B, (B,), th, ctx))


def kashiwara_bundle(c: CartanDatum, ctx: Context | None = None) -> GaloisBundle:
    ctx = ctx or Context()
    A = build_Uprime(c, ctx)
    H = build_Uhat(c, ctx)
    B = build_kashiwara(c, ctx)
    Bo = B.op()
    Ap, Hh = A.handle, H.handle
    tor = kashiwara_torsor(c, ctx, B)
    aT, bT, aZ, bZ, ga, de, sz = {}, {}, {}, {}, {}, {}, {}
    for i in c.indices:
        t, ti = t_(i), tinv(i)
        ep, f, fp, eh = f"ep{i}", f"f{i}", f"fp{i}", f"eh{i}"
        s = (Ap, B)
        aT[ep] = tensor(s, (1, "", ep), (1, f"{ti} {ep}", ti))
        aT[f] = tensor(s, (1, "", f), (1, f"{ti} {fp}", ti))
        aT[t] = tensor(s, (1, t, t))
        aT[ti] = tensor(s, (1, ti, ti))
        s = (B, Hh)
        bT[ep] = tensor(s, (1, "", f"{ti} {eh}"), (1, ep, ti))
        bT[f] = tensor(s, (1, f, ti), (1, "", f))
        bT[t] = tensor(s, (1, t, t))
        bT[ti] = tensor(s, (1, ti, ti))
        s = (Hh, Bo)
        aZ[ep] = tensor(s, (1, t, ep), (-1, eh, ""))
        aZ[f] = tensor(s, (-1, f"{t} {f}", ""), (1, t, f))
        aZ[t] = tensor(s, (1, ti, t))
        aZ[ti] = tensor(s, (1, t, ti))
        s = (Bo, Ap)
        bZ[ep] = tensor(s, (-1, ti, ep), (1, ep, ""))
        bZ[f] = tensor(s, (-1, ti, fp), (1, f, ""))
        bZ[t] = tensor(s, (1, t, ti))
        bZ[ti] = tensor(s, (1, ti, t))
        s = (B, Bo)
        ga[ep] = tensor(s, (1, f"{t} {ep}", ""), (-1, t, ep))
        ga[fp] = tensor(s, (1, f"{t} {f}", ""), (-1, t, f))
        ga[t] = tensor(s, (1, t, ti))
        ga[ti] = tensor(s, (1, ti, t))
        s = (Bo, B)
        de[eh] = tensor(s, (1, ti, f"{t} {ep}"), (-1, ep, ""))
        de[f] = tensor(s, (1, "", f), (-1, f"{f} {t}", ti))
        de[t] = tensor(s, (1, ti, t))
        de[ti] = tensor(s, (1, t, ti))
    for g in B.presentation.names:
        sz[g] = tensor((Bo,), (1, g))
    S_T = Morphism("S_B", B, (B,), tor.theta.images)  # θ_B viewed as T -> Z^op = B
    S_T.certificate, S_T.witness = tor.theta.certificate, tor.theta.witness
    return GaloisBundle(
        _label("kashiwara", c), A, H, B, Bo,
        alpha_T=_certified("α_B", B, (Ap, B), aT, ctx),
        beta_T=_certified("β_B", B, (B, Hh), bT, ctx),
        alpha_Z=_certified("α_B^op", Bo, (Hh, Bo), aZ, ctx),
        beta_Z=_certified("β_B^op", Bo, (Bo, Ap), bZ, ctx),
        gamma=_certified("γ", Ap, (B, Bo), ga, ctx),
        delta=_certified("δ", Hh, (Bo, B), de, ctx),
        S_T=S_T,
        S_Z=_certified("S_B^op", Bo, (Bo,), sz, ctx),
        torsor=tor,
        meta={"kind": "kashiwara", "cartan": c},
    )


# ---------------------------------------------------------------------------
# Sridharan algebras


def sridharan_presentation(lie: LieDatum, c: CocycleSpec, name: str | None = None) -> Presentation:
    if c.lie is not lie and c.lie.basis != lie.basis:
        raise ValidationError("cocycle is defined on a different Lie algebra")
    bad = c.violation()
    if bad is not None:
        from .errors import CocycleError
        raise CocycleError(f"cocycle identity fails on {bad}", bad)
    rels, labels = [], []
    basis = lie.basis
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            x, y = basis[a], basis[b]
            rel = W(f"{x} {y}") - W(f"{y} {x}")
            for z, k in sorted(lie.bracket(x, y).items()):
                rel = rel - W(z, Scalar.from_fraction(Fraction(k)))
            if c(x, y):
                rel = rel - Element.scalar(Scalar.from_fraction(c(x, y)))
            rels.append(rel)
            labels.append(f"[{x},{y}]")
    name = name or f"U_c({lie.name})"
    pres = Presentation(name, basis, rels, precedence=basis, labels=labels)
    pres.meta = {"lie": lie, "cocycle": c}
    return pres


def build_sridharan(lie: LieDatum, c: CocycleSpec, ctx: Context | None = None,
                    name: str | None = None) -> AlgebraHandle:
    ctx = ctx or Context()
    return _handle(sridharan_presentation(lie, c, name), ctx)


def _primitive_hopf(handle: AlgebraHandle, ctx: Context) -> HopfAlgebra:
    A = handle
    names = A.presentation.names
    dl = {x: tensor((A, A), (1, x, ""), (1, "", x)) for x in names}
    an = {x: tensor((A.op(),), (-1, x)) for x in names}
    co = {x: TensorElement.zero(()) for x in names}
    n = A.name
    return HopfAlgebra(A, _certified(f"Δ[{n}]", A, (A, A), dl, ctx),
                       _certified(f"S[{n}]", A, (A.op(),), an, ctx),
                       _certified(f"ε[{n}]", A, (), co, ctx))


def _primitive_map(name, source: AlgebraHandle, target, ctx: Context, sign: int = 1) -> Morphism:
    """x ↦ x⊗1 + 1⊗x (two legs), or x ↦ sign*x (one leg)."""
    imgs = {}
    for x in source.presentation.names:
        if len(target) == 2:
            imgs[x] = tensor(target, (1, x, ""), (1, "", x))
        else:
            imgs[x] = tensor(target, (sign, x))
    return _certified(name, source, target, imgs, ctx)


def sridharan_bundle(lie: LieDatum, c: CocycleSpec, ctx: Context | None = None) -> GaloisBundle:
    ctx = ctx or Context()
    zero = CocycleSpec(lie, {})
    U = _primitive_hopf(build_sridharan(lie, zero, ctx, f"U({lie.name})"), ctx)
    T = build_sridharan(lie, c, ctx, f"U_c({lie.name})")
    Z = build_sridharan(lie, c.negated(), ctx, f"U_-c({lie.name})")
    A = U.handle
    sig3 = (T, T.op(), T)
    mu = {x: tensor(sig3, (1, x, "", ""), (-1, "", x, ""), (1, "", "", x)) for x in lie.basis}
    tor = Torsor(T, _certified("μ", T, sig3, mu, ctx), identity(T, "θ=Id"))
    tor.theta.certify()
    return GaloisBundle(
        f"sridharan({lie.name})", U, U, T, Z,
        alpha_T=_primitive_map("α_T", T, (A, T), ctx),
        beta_T=_primitive_map("β_T", T, (T, A), ctx),
        alpha_Z=_primitive_map("α_Z", Z, (A, Z), ctx),
        beta_Z=_primitive_map("β_Z", Z, (Z, A), ctx),
        gamma=_primitive_map("γ", A, (T, Z), ctx),
        delta=_primitive_map("δ", A, (Z, T), ctx),
        S_T=_primitive_map("S_T", T, (Z.op(),), ctx, -1),
        S_Z=_primitive_map("S_Z", Z, (T.op(),), ctx, -1),
        torsor=tor,
        meta={"kind": "sridharan", "lie": lie, "cocycle": c},
    )


# ---------------------------------------------------------------------------
# classical limits


def _specialize(e: Element, drop: set, label: str, pres_name: str) -> Element:
    out = Element()
    for w, c in e.terms.items():
        try:
            v = c.at_q1()
        except PoleError as exc:
            raise PoleError(f"{pres_name}: relation {label} has a pole at q = 1 ({c})") from exc
        if v:
            out = out + Element.word(tuple(g for g in w if g not in drop), Scalar.from_fraction(v))
    return out


def classical_limit_presentation(pres: Presentation, with_cartan: bool = False,
                                 rename: Mapping[str, str] | None = None) -> Presentation:
    """Specialize q = 1, send toral letters to 1, optionally add additive Cartan generators h_i."""
    meta = getattr(pres, "meta", {})
    toral = set(meta.get("toral", ()))
    rename = dict(rename or {})
    rels, labels = [], []
    for lab, r in zip(pres.labels, pres.relations):
        s = _specialize(r, toral, lab, pres.name)
        if rename:
            s = Element({tuple(rename.get(g, g) for g in w): c for w, c in s.terms.items()})
        if not s.is_zero():
            rels.append(s)
            labels.append(lab)
    gens = [rename.get(g, g) for g in pres.names if g not in toral]
    prec = [rename.get(g, g) for g in pres.precedence if g not in toral]
    if with_cartan:
        c: CartanDatum = meta["cartan"]
        L: Letters = meta["letters"]
        hs = [f"h{i}" for i in c.indices]
        gens += hs
        prec += hs
        for j in c.indices:
            for i in c.indices:
                for x, s in ((rename.get(L.E(i), L.E(i)), 1), (rename.get(L.F(i), L.F(i)), -1)):
                    rels.append(W(f"h{j} {x}") - W(f"{x} h{j}") - W(x, s * c.a(j, i)))
                    labels.append(f"[h{j},{x}]")
            for k in c.indices:
                if j < k:
                    rels.append(W(f"h{j} h{k}") - W(f"h{k} h{j}"))
                    labels.append(f"[h{j},h{k}]")
    out = Presentation(pres.name + "|q=1" + ("+h" if with_cartan else ""), gens, rels,
                       precedence=prec, labels=labels)
    out.meta = {k: v for k, v in meta.items() if k != "toral"}
    out.meta["toral"] = []
    return out


def classical_limit(h: AlgebraHandle, ctx: Context | None = None, with_cartan: bool = False,
                    rename: Mapping[str, str] | None = None) -> AlgebraHandle:
    ctx = ctx or Context()
    return _handle(classical_limit_presentation(h.presentation, with_cartan, rename), ctx)


def mutually_reducing(a: AlgebraHandle, b: AlgebraHandle) -> tuple[bool, list]:
    """Every relation of each presentation reduces to zero in the other (same generator names)."""
    if set(a.presentation.names) != set(b.presentation.names):
        return False, [("generators", f"{sorted(a.presentation.names)} vs {sorted(b.presentation.names)}")]
    bad = []
    for x, y in ((a, b), (b, a)):
        for lab, r in zip(x.presentation.labels, x.presentation.relations):
            nf = y.system.normal_form(r)
            if not nf.is_zero():
                bad.append((f"{x.name}:{lab}", str(nf)))
    return not bad, bad


# ---------------------------------------------------------------------------
# Lie datum of the classical limit of B


@dataclass
class RootVector:
    name: str
    expr: object       # a letter name, or a pair (expr, expr) meaning the commutator
    weight: tuple
    element: Element   # normal form in the enveloping algebra


def _commutator(x: Element, y: Element) -> Element:
    return x * y - y * x


def _fmpq(x: Fraction) -> fmpq:
    return fmpq(x.numerator, x.denominator)


def _solve_in_span(target: Element, basis: list[Element]):
    """Rational coefficients expressing target in the span of basis, or None."""
    words = sorted({w for e in basis + [target] for w in e.terms})
    if not words:
        return [Fraction(0)] * len(basis)
    idx = {w: k for k, w in enumerate(words)}
    n = len(basis)
    M = fmpq_mat(len(words), n + 1)
    for j, e in enumerate(basis):
        for w, c in e.terms.items():
            M[idx[w], j] = _fmpq(c.at_q1())
    for w, c in target.terms.items():
        M[idx[w], n] = _fmpq(c.at_q1())
    R, rank = M.rref()
    sol = [Fraction(0)] * n
    for r in range(rank):
        lead = next(k for k in range(n + 1) if R[r, k] != 0)
        if lead == n:
            return None
        v = R[r, n]
        sol[lead] = Fraction(int(v.p), int(v.q))
    return sol


def _positive_part(c: CartanDatum, letter: str, ctx: Context) -> AlgebraHandle:
    rels, labels = [], []
    for i in c.indices:
        for j in c.indices:
            if i == j or (c.a(i, j) == 0 and i > j):
                continue
            r = serre_relation(f"{letter}{i}", f"{letter}{j}", c.a(i, j), c.d(i))
            rels.append(Element({w: Scalar.from_fraction(k.at_q1()) for w, k in r.terms.items()}))
            labels.append(f"serre({i},{j})")
    names = [f"{letter}{i}" for i in c.indices]
    return _handle(Presentation(f"U(n:{letter}:{c.label()})", names, rels, precedence=names, labels=labels), ctx)


def root_vectors(c: CartanDatum, letter: str, ctx: Context | None = None, max_height: int | None = None):
    """Left-normed commutators [[x_i, x_j], ...] spanning the nilpotent Lie algebra on the x letters."""
    ctx = ctx or Context()
    h = _positive_part(c, letter, ctx)
    sysm = h.system
    n = c.rank
    max_height = max_height or ctx.degree_bound
    out = [RootVector(f"{letter}{i}", f"{letter}{i}",
                      tuple(1 if k == i else 0 for k in c.indices), W(f"{letter}{i}"))
           for i in c.indices]
    level = list(out)
    height = 1
    while level and height < max_height:
        nxt = []
        for b in level:
            for i in c.indices:
                wt = tuple(x + (1 if k == i else 0) for k, x in zip(c.indices, b.weight))
                cand = sysm.normal_form(_commutator(b.element, W(f"{letter}{i}")))
                if cand.is_zero():
                    continue
                same = [r.element for r in out if r.weight == wt]
                if _solve_in_span(cand, same) is not None:
                    continue
                rv = RootVector(f"{b.name}{i}", (b.expr, f"{letter}{i}"), wt, cand)
                out.append(rv)
                nxt.append(rv)
        level = nxt
        height += 1
    if level:
        raise InconclusiveError(f"root vectors of {c.label()} not exhausted by height {max_height}")
    return h, out


def _bracket_table(h: AlgebraHandle, roots: list[RootVector]) -> dict:
    table = {}
    for a in roots:
        for b in roots:
            if a.name >= b.name and a is not b and (b.name, a.name) in table:
                continue
            if a is b:
                continue
            br = h.system.normal_form(_commutator(a.element, b.element))
            if br.is_zero():
                continue
            wt = tuple(x + y for x, y in zip(a.weight, b.weight))
            cands = [r for r in roots if r.weight == wt]
            sol = _solve_in_span(br, [r.element for r in cands])
            if sol is None:
                raise ValidationError(f"[{a.name},{b.name}] leaves the span of the root vectors")
            table[(a.name, b.name)] = {r.name: s for r, s in zip(cands, sol) if s}
    return table


def _pairing(c: CartanDatum, j: int, weight: tuple) -> int:
    return sum(m * c.a(j, k) for k, m in zip(c.indices, weight))


@dataclass
class ClassicalLieData:
    lie: LieDatum
    cocycle: CocycleSpec
    exprs: dict          # basis name -> letter or nested commutator pair (in e/f/h letters)
    with_cartan: bool


def kashiwara_lie_datum(c: CartanDatum, ctx: Context | None = None, with_cartan: bool = False,
                        cocycle_scale: Fraction | int = 1) -> ClassicalLieData:
    """Nilpotent Lie algebra n+ ⊕ n- (optionally with the Cartan block) and c(e_i, f_j) = scale*δ_ij."""
    ctx = ctx or Context()
    he, er = root_vectors(c, "e", ctx)
    hf, fr = root_vectors(c, "f", ctx)
    brackets = {}
    brackets.update(_bracket_table(he, er))
    brackets.update(_bracket_table(hf, fr))
    basis = [r.name for r in er] + [r.name for r in fr]
    exprs = {r.name: r.expr for r in er + fr}
    if with_cartan:
        for j in c.indices:
            hj = f"h{j}"
            basis.append(hj)
            exprs[hj] = hj
            for r in er:
                k = _pairing(c, j, r.weight)
                if k:
                    brackets[(hj, r.name)] = {r.name: Fraction(k)}
            for r in fr:
                k = _pairing(c, j, r.weight)
                if k:
                    brackets[(hj, r.name)] = {r.name: Fraction(-k)}
    lie = LieDatum(basis, brackets, name=f"a({c.label()})" + ("+h" if with_cartan else ""))
    vals = {(f"e{i}", f"f{i}"): Fraction(cocycle_scale) for i in c.indices}
    return ClassicalLieData(lie, CocycleSpec(lie, vals), exprs, with_cartan)


@dataclass
class MatchResult:
    ok: bool
    forward: Morphism
    backward: Morphism
    failures: list

    def __bool__(self):
        return self.ok


def _expr_element(expr, rename: Mapping[str, str]) -> Element:
    if isinstance(expr, str):
        return W(rename.get(expr, expr))
    a, b = expr
    return _commutator(_expr_element(a, rename), _expr_element(b, rename))


def check_sridharan_match(classical_B: AlgebraHandle, lie: LieDatum, cocycle: CocycleSpec,
                          exprs: Mapping | None = None, ctx: Context | None = None) -> MatchResult:
    """Mutual containment of relation sets via the letter identification e_i ↔ ep_i.

    The forward map sends each basis element of the Lie algebra to its commutator
    expression in the classical Kashiwara letters; the backward map sends letters
    to basis elements.  Both must respect relations and compose to the identity.
    """
    ctx = ctx or Context()
    S = build_sridharan(lie, cocycle, ctx, f"U_c({lie.name})")
    names_B = classical_B.presentation.names
    to_B = {}
    for g in names_B:
        if g.startswith("ep"):
            to_B["e" + g[2:]] = g
        else:
            to_B[g] = g
    exprs = dict(exprs or {x: x for x in lie.basis})
    fwd_imgs = {}
    for x in lie.basis:
        e = classical_B.system.normal_form(_expr_element(exprs.get(x, x), to_B))
        fwd_imgs[x] = TensorElement((classical_B,), {(w,): c for w, c in e.terms.items()})
    from_B = {v: k for k, v in to_B.items()}
    bwd_imgs = {}
    failures = []
    for g in names_B:
        x = from_B.get(g)
        if x is None or x not in lie.pos:
            failures.append((g, "no matching Lie basis element"))
            bwd_imgs[g] = TensorElement.zero((S,))
        else:
            bwd_imgs[g] = tensor((S,), (1, x))
    fwd = define_morphism("φ", S, (classical_B,), fwd_imgs, strict=False)
    bwd = define_morphism("ψ", classical_B, (S,), bwd_imgs, strict=False)
    for m in (fwd, bwd):
        if m.certificate == FAILED:
            failures.append((m.witness.label, m.witness.normal_form))
        elif m.certificate == INCONCLUSIVE:
            raise InconclusiveError(f"{m.name}: {m.witness.label}")
    if not failures:
        for x in lie.basis:
            back = bwd.apply(fwd.images[x])
            if back != tensor((S,), (1, x)):
                failures.append((f"ψφ({x})", str(back)))
        for g in names_B:
            there = fwd.apply(bwd.images[g])
            if there != tensor((classical_B,), (1, g)):
                failures.append((f"φψ({g})", str(there)))
    return MatchResult(not failures, fwd, bwd, failures)
