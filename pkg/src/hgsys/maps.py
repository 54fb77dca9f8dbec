"""Tensor products with per-leg orientation and algebra maps between them.

An element of ``A1 ⊗ ... ⊗ An`` is a :class:`TensorElement`: a dict from
tuples of words (one word per leg) to scalars.  A leg marked opposite stores
the same words as the straight algebra; only multiplication is reversed.

Maps are linear maps on tensor elements.  :class:`Morphism` is the only kind
defined by generator images; the leg calculus (lifts, leg products, flips,
unit insertion, counit contraction) builds every other map as a composite.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .engine import (BOUND_LIMITED, CERTAIN, SATURATED, CompletedSystem, Element,
                     render_word)
from .errors import InconclusiveError, SignatureMismatch
from .scalars import ONE, Scalar, as_scalar

VERIFIED = "verified"
FAILED = "failed"
UNCHECKED = "unchecked"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class AlgebraHandle:
    """A completed presentation viewed straight or opposite."""

    name: str
    system: CompletedSystem
    opposite: bool = False

    @property
    def presentation(self):
        return self.system.source

    @property
    def key(self):
        return (self.system.source.digest(), self.opposite)

    def op(self) -> "AlgebraHandle":
        name = self.name[:-3] if self.opposite and self.name.endswith("^op") else self.name + "^op"
        return AlgebraHandle(name, self.system, not self.opposite)

    def same_space(self, other: "AlgebraHandle") -> bool:
        return self.system.source.digest() == other.system.source.digest()

    def __eq__(self, other):
        return isinstance(other, AlgebraHandle) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<{self.name}>"


def signature(*handles: AlgebraHandle) -> tuple:
    return tuple(handles)


def sig_name(sig: Sequence[AlgebraHandle]) -> str:
    return " ⊗ ".join(h.name for h in sig) if sig else "k"


def _same_sig(a, b, strict: bool) -> bool:
    if len(a) != len(b):
        return False
    if strict:
        return all(x == y for x, y in zip(a, b))
    return all(x.same_space(y) for x, y in zip(a, b))


class TensorElement:
    """Finite sum of pure tensors over a signature, with per-leg raw degree bounds."""

    __slots__ = ("sig", "terms", "span")

    def __init__(self, sig, terms=None, span=None):
        self.sig = tuple(sig)
        self.terms = {} if terms is None else {k: v for k, v in terms.items() if v}
        self.span = tuple(span) if span is not None else self._span_of_terms()

    def _span_of_terms(self):
        span = [0] * len(self.sig)
        for key in self.terms:
            for i, w in enumerate(key):
                if len(w) > span[i]:
                    span[i] = len(w)
        return tuple(span)

    @classmethod
    def pure(cls, sig, legs: Sequence, coeff=ONE) -> "TensorElement":
        sig = tuple(sig)
        if len(legs) != len(sig):
            raise SignatureMismatch(f"{len(legs)} legs given for signature {sig_name(sig)}")
        return cls.from_elements(sig, [_as_elem(x) for x in legs], coeff)

    @classmethod
    def from_elements(cls, sig, elements: Sequence[Element], coeff=ONE) -> "TensorElement":
        coeff = as_scalar(coeff)
        terms = {(): coeff} if coeff else {}
        for e in elements:
            nxt = {}
            for key, c in terms.items():
                for w, d in e.terms.items():
                    k = key + (w,)
                    s = nxt.get(k)
                    s = c * d if s is None else s + c * d
                    if s:
                        nxt[k] = s
                    else:
                        nxt.pop(k, None)
            terms = nxt
        return cls(sig, terms)

    @classmethod
    def one(cls, sig) -> "TensorElement":
        sig = tuple(sig)
        return cls(sig, {tuple(() for _ in sig): ONE})

    @classmethod
    def zero(cls, sig) -> "TensorElement":
        return cls(sig, {})

    def _check(self, other):
        if not isinstance(other, TensorElement):
            raise TypeError(f"expected TensorElement, got {type(other).__name__}")
        if not _same_sig(self.sig, other.sig, strict=False):
            raise SignatureMismatch(f"{sig_name(self.sig)} vs {sig_name(other.sig)}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return TensorElement(self.sig, out, _max_span(self.span, other.span))

    def __neg__(self):
        return TensorElement(self.sig, {k: -c for k, c in self.terms.items()}, self.span)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TensorElement":
        c = as_scalar(c)
        return TensorElement(self.sig, {k: v * c for k, v in self.terms.items()} if c else {}, self.span)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int)):
            return self.scale(other)
        self._check(other)
        ops = [h.opposite for h in self.sig]
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple((b + a) if o else (a + b) for a, b, o in zip(k1, k2, ops))
                c = c1 * c2
                s = out.get(key)
                s = c if s is None else s + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        span = tuple(x + y for x, y in zip(self.span, other.span))
        return TensorElement(self.sig, out, span).normalized()

    __rmul__ = scale

    def normalized(self) -> "TensorElement":
        systems = [h.system for h in self.sig]
        out: dict = {}
        for key, c in self.terms.items():
            partial = {(): c}
            for sys_, w in zip(systems, key):
                nf = sys_.reduce_word(w)
                nxt = {}
                for pk, pc in partial.items():
                    for v, d in nf.items():
                        k = pk + (v,)
                        s = nxt.get(k)
                        s = pc * d if s is None else s + pc * d
                        if s:
                            nxt[k] = s
                        else:
                            nxt.pop(k, None)
                partial = nxt
            for k, v in partial.items():
                s = out.get(k)
                s = v if s is None else s + v
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return TensorElement(self.sig, out, self.span)

    def is_zero(self) -> tuple[bool, str]:
        nf = self.normalized()
        return not nf.terms, self.certainty()

    def certainty(self) -> str:
        for h, d in zip(self.sig, self.span):
            s = h.system
            if s.status == SATURATED and d >= s.degree_bound:
                return BOUND_LIMITED
        return CERTAIN

    def leg_degree(self) -> int:
        return max(self.span) if self.span else 0

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return _same_sig(self.sig, other.sig, strict=False) and \
            self.normalized().terms == other.normalized().terms

    __hash__ = None

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: tuple((len(w), w) for w in kv[0]))

    def __str__(self):
        return render_tensor(self)

    def __repr__(self):
        return f"TensorElement[{sig_name(self.sig)}]({self})"

    def with_sig(self, sig) -> "TensorElement":
        """Reinterpret over legs with the same underlying spaces (orientation may differ)."""
        if not _same_sig(self.sig, sig, strict=False):
            raise SignatureMismatch(f"{sig_name(self.sig)} vs {sig_name(sig)}")
        return TensorElement(sig, self.terms, self.span)


def _max_span(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _as_elem(x) -> Element:
    if isinstance(x, Element):
        return x
    if isinstance(x, str):
        return Element.word(tuple(x.split()))
    if isinstance(x, (tuple, list)):
        return Element.word(tuple(x))
    return Element.scalar(x)


def render_tensor(t: TensorElement) -> str:
    if not t.terms:
        return "0"
    parts = []
    for key, c in t.sorted_terms():
        legs = "⊗".join(f"({render_word(w)})" for w in key) if key else "1"
        parts.append(f"({c})*{legs}")
    return " + ".join(parts)


@dataclass
class Witness:
    label: str
    normal_form: str
    degree: int

    def to_json(self):
        return {"label": self.label, "normal_form": self.normal_form, "degree": self.degree}


class Map:
    """Linear map between tensor signatures."""

    name = "map"
    source: tuple
    target: tuple

    def apply(self, x: TensorElement) -> TensorElement:
        raise NotImplementedError

    def __call__(self, x):
        if isinstance(x, Element):
            x = TensorElement(self.source, {(w,): c for w, c in x.terms.items()})
        elif not isinstance(x, TensorElement):
            x = TensorElement.pure(self.source, [x])
        return self.apply(x)

    def certified(self) -> bool:
        return all(m.certificate == VERIFIED for m in self.morphisms())

    def morphisms(self) -> list:
        return []

    def __matmul__(self, other: "Map") -> "Map":
        return compose(self, other)


class Morphism(Map):
    """Algebra map out of a single algebra, given on generators."""

    def __init__(self, name: str, source: AlgebraHandle, target, images: Mapping[str, TensorElement]):
        self.name = name
        self.source_handle = source
        self.source = (source,)
        self.target = tuple(target)
        missing = [g for g in source.presentation.names if g not in images]
        if missing:
            raise SignatureMismatch(f"{name}: no image for generators {missing}")
        for g, img in images.items():
            if not _same_sig(img.sig, self.target, strict=False):
                raise SignatureMismatch(f"{name}({g}) lives in {sig_name(img.sig)}, "
                                        f"expected {sig_name(self.target)}")
        self.images = {g: TensorElement(self.target, img.terms).normalized() for g, img in images.items()}
        self.certificate = UNCHECKED
        self.witness: Witness | None = None
        self._memo: dict = {}

    def morphisms(self):
        return [self]

    def image_of_word(self, w) -> TensorElement:
        hit = self._memo.get(w)
        if hit is not None:
            return hit
        if not w:
            out = TensorElement.one(self.target)
        elif len(w) == 1:
            out = self.images[w[0]]
        else:
            # opposite source: a stored word x1...xn is the op-product xn * ... * x1
            if self.source_handle.opposite:
                out = self.images[w[-1]] * self.image_of_word(w[:-1])
            else:
                out = self.image_of_word(w[:-1]) * self.images[w[-1]]
        self._memo[w] = out
        return out

    def apply_element(self, e: Element) -> TensorElement:
        acc = TensorElement.zero(self.target)
        for w, c in e.terms.items():
            acc = acc + self.image_of_word(w).scale(c)
        return acc

    def apply(self, x: TensorElement) -> TensorElement:
        if len(x.sig) != 1 or not x.sig[0].same_space(self.source_handle):
            raise SignatureMismatch(f"{self.name} applied to {sig_name(x.sig)}")
        acc = TensorElement.zero(self.target)
        for (w,), c in x.terms.items():
            acc = acc + self.image_of_word(w).scale(c)
        return acc

    def certify(self) -> str:
        pres = self.source_handle.presentation
        status = VERIFIED
        for label, rel in zip(pres.labels, pres.relations):
            img = self.apply_element(rel)
            zero, certainty = img.is_zero()
            if not zero:
                nf = img.normalized()
                if certainty == BOUND_LIMITED:
                    status = INCONCLUSIVE
                    self.witness = Witness(f"{self.name} on relation {label}", str(nf), img.leg_degree())
                    continue
                self.certificate = FAILED
                self.witness = Witness(f"{self.name} on relation {label}", str(nf), img.leg_degree())
                return FAILED
            if certainty == BOUND_LIMITED:
                status = INCONCLUSIVE
                if self.witness is None:
                    self.witness = Witness(f"{self.name} on relation {label}", "0 (bound-limited)",
                                           img.leg_degree())
        self.certificate = status
        if status == VERIFIED:
            self.witness = None
        return status

    def opposite(self) -> "Morphism":
        """Same images viewed as A^op -> (B1 ⊗ ... ⊗ Bk)^op; legs keep their order."""
        tgt = tuple(h.op() for h in self.target)
        m = Morphism(self.name + "^op", self.source_handle.op(), tgt,
                     {g: img.with_sig(tgt) for g, img in self.images.items()})
        m.certificate, m.witness = self.certificate, self.witness
        return m

    def with_images(self, images, name=None) -> "Morphism":
        m = Morphism(name or self.name, self.source_handle, self.target, images)
        return m

    def render(self) -> list[str]:
        return [f"{g} ↦ {self.images[g]}" for g in self.source_handle.presentation.names]

    def __repr__(self):
        return f"Morphism({self.name}: {sig_name(self.source)} -> {sig_name(self.target)}, {self.certificate})"


def define_morphism(name: str, source: AlgebraHandle, target, images: Mapping[str, TensorElement],
                    strict: bool = True) -> Morphism:
    m = Morphism(name, source, target, images)
    status = m.certify()
    if strict and status == INCONCLUSIVE:
        raise InconclusiveError(f"{name}: relation check is bound-limited ({m.witness.label})")
    return m


def identity(handle: AlgebraHandle, name: str | None = None) -> Morphism:
    sig = (handle,)
    images = {g: TensorElement.pure(sig, [(g,)]) for g in handle.presentation.names}
    m = Morphism(name or f"id_{handle.name}", handle, sig, images)
    m.certificate = VERIFIED
    return m


class Composite(Map):
    def __init__(self, outer: Map, inner: Map):
        if not _same_sig(outer.source, inner.target, strict=False):
            raise SignatureMismatch(f"cannot compose {outer.name}: {sig_name(outer.source)} "
                                    f"after {inner.name}: {sig_name(inner.target)}")
        self.outer, self.inner = outer, inner
        self.source, self.target = inner.source, outer.target
        self.name = f"{outer.name}∘{inner.name}"

    def apply(self, x):
        mid = self.inner.apply(x)
        return self.outer.apply(mid.with_sig(self.outer.source))

    def morphisms(self):
        return self.inner.morphisms() + self.outer.morphisms()


def compose(outer: Map, inner: Map) -> Map:
    return Composite(outer, inner)


class LegLift(Map):
    """Apply ``f`` on one leg, identity elsewhere."""

    def __init__(self, f: Map, position: int, ambient):
        ambient = tuple(ambient)
        if len(f.source) != 1:
            raise SignatureMismatch("leg_lift needs a single-leg source")
        if not 0 <= position < len(ambient):
            raise SignatureMismatch(f"leg {position} out of range for {sig_name(ambient)}")
        if not ambient[position].same_space(f.source[0]):
            raise SignatureMismatch(f"leg {position} is {ambient[position].name}, "
                                    f"{f.name} expects {f.source[0].name}")
        self.f, self.position = f, position
        self.source = ambient
        self.target = ambient[:position] + tuple(f.target) + ambient[position + 1:]
        self.name = _lift_name(f.name, position, len(ambient))
        self._memo: dict = {}

    def _image(self, w):
        hit = self._memo.get(w)
        if hit is None:
            hit = self.f.apply(TensorElement(self.f.source, {(w,): ONE}, (len(w),)))
            self._memo[w] = hit
        return hit

    def apply(self, x):
        p = self.position
        out: dict = {}
        span = None
        for key, c in x.terms.items():
            img = self._image(key[p])
            for ikey, d in img.terms.items():
                k = key[:p] + ikey + key[p + 1:]
                v = c * d
                s = out.get(k)
                s = v if s is None else s + v
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
            ispan = img.span if img.sig else ()
            cand = x.span[:p] + ispan + x.span[p + 1:]
            span = cand if span is None else _max_span(span, cand)
        if span is None:
            span = x.span[:p] + (0,) * len(self.f.target) + x.span[p + 1:]
        return TensorElement(self.target, out, span)

    def morphisms(self):
        return self.f.morphisms()


def _lift_name(name, pos, n):
    parts = ["id"] * n
    parts[pos] = name
    return "(" + "⊗".join(parts) + ")"


def leg_lift(f: Map, position: int, ambient) -> Map:
    return LegLift(f, position, ambient)


def tensor_maps(maps: Sequence[Map], ambient) -> Map:
    """f1 ⊗ f2 ⊗ ... on consecutive single legs (applied right to left)."""
    ambient = tuple(ambient)
    if len(maps) != len(ambient):
        raise SignatureMismatch("one map per leg")
    cur: Map | None = None
    sig = ambient
    for pos in range(len(maps) - 1, -1, -1):
        f = maps[pos]
        if f is None:
            continue
        lift = LegLift(f, pos, sig)
        cur = lift if cur is None else Composite(lift, cur)
        sig = lift.target
    if cur is None:
        return Permute(ambient, list(range(len(ambient))))
    return cur


class MultiplyLegs(Map):
    """Merge legs i and i+1 by multiplying in ``result`` (taken straight unless stated)."""

    def __init__(self, sig, i: int, result: AlgebraHandle | None = None):
        sig = tuple(sig)
        if not 0 <= i < len(sig) - 1:
            raise SignatureMismatch(f"cannot multiply legs {i},{i + 1} of {sig_name(sig)}")
        a, b = sig[i], sig[i + 1]
        if not a.same_space(b):
            raise SignatureMismatch(f"legs {a.name} and {b.name} have different presentations")
        if result is None:
            result = a if not a.opposite else a.op()
        if not result.same_space(a):
            raise SignatureMismatch("result leg must share the presentation")
        self.i, self.result = i, result
        self.source = sig
        self.target = sig[:i] + (result,) + sig[i + 2:]
        self.name = f"m{i + 1}{i + 2}"

    def apply(self, x):
        i = self.i
        rev = self.result.opposite
        terms = {}
        for key, c in x.terms.items():
            w = key[i + 1] + key[i] if rev else key[i] + key[i + 1]
            k = key[:i] + (w,) + key[i + 2:]
            s = terms.get(k)
            s = c if s is None else s + c
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        span = x.span[:i] + (x.span[i] + x.span[i + 1],) + x.span[i + 2:]
        return TensorElement(self.target, terms, span).normalized()


def multiply_legs(sig, i: int, result: AlgebraHandle | None = None) -> Map:
    return MultiplyLegs(sig, i, result)


class Permute(Map):
    """Output leg k is input leg perm[k]."""

    def __init__(self, sig, perm: Sequence[int], name: str = "τ"):
        sig = tuple(sig)
        if sorted(perm) != list(range(len(sig))):
            raise SignatureMismatch(f"bad leg permutation {perm}")
        self.perm = tuple(perm)
        self.source = sig
        self.target = tuple(sig[p] for p in perm)
        self.name = name

    def apply(self, x):
        perm = self.perm
        terms = {tuple(key[p] for p in perm): c for key, c in x.terms.items()}
        return TensorElement(self.target, terms, tuple(x.span[p] for p in perm))


def flip(sig, i: int, j: int) -> Map:
    n = len(sig)
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return Permute(sig, perm, f"τ{i + 1}{j + 1}")


def block_flip(sig, sizes: Sequence[int]) -> Map:
    """Swap two adjacent blocks of legs atomically: (X ⊗ Y) -> (Y ⊗ X)."""
    a, b = sizes
    if a + b != len(sig):
        raise SignatureMismatch(f"blocks {sizes} do not cover {sig_name(sig)}")
    perm = list(range(a, a + b)) + list(range(a))
    return Permute(sig, perm, f"τ({a},{b})")


def reverse_legs(sig) -> Map:
    return Permute(sig, list(range(len(sig) - 1, -1, -1)), "rev")


class InsertUnit(Map):
    def __init__(self, sig, position: int, handle: AlgebraHandle):
        sig = tuple(sig)
        self.position, self.handle = position, handle
        self.source = sig
        self.target = sig[:position] + (handle,) + sig[position:]
        self.name = f"η@{position + 1}"

    def apply(self, x):
        p = self.position
        terms = {key[:p] + ((),) + key[p:]: c for key, c in x.terms.items()}
        return TensorElement(self.target, terms, x.span[:p] + (0,) + x.span[p:])


class Reinterpret(Map):
    """Identity on underlying spaces, changing only leg orientations/labels."""

    def __init__(self, source, target):
        source, target = tuple(source), tuple(target)
        if not _same_sig(source, target, strict=False):
            raise SignatureMismatch(f"{sig_name(source)} vs {sig_name(target)}")
        self.source, self.target = source, target
        self.name = "≅"

    def apply(self, x):
        return x.with_sig(self.target)


class FunctionMap(Map):
    """A linear map given by a Python function on tensor elements."""

    def __init__(self, name, source, target, fn: Callable[[TensorElement], TensorElement], parts=()):
        self.name, self.source, self.target, self.fn = name, tuple(source), tuple(target), fn
        self.parts = list(parts)

    def apply(self, x):
        return self.fn(x)

    def morphisms(self):
        out = []
        for p in self.parts:
            out.extend(p.morphisms())
        return out


@dataclass
class Comparison:
    generator: str
    difference: TensorElement
    equal: bool
    certainty: str


def compare_on_generators(f: Map, g: Map, generators: Iterable[str] | None = None,
                          strict: bool = False) -> list[Comparison]:
    if not _same_sig(f.source, g.source, strict=False) or len(f.source) != 1:
        raise SignatureMismatch(f"{f.name} and {g.name} have different sources")
    if not _same_sig(f.target, g.target, strict=strict):
        raise SignatureMismatch(f"{f.name}: {sig_name(f.target)} vs {g.name}: {sig_name(g.target)}")
    src = f.source[0]
    gens = list(generators) if generators is not None else src.presentation.names
    out = []
    for x in gens:
        elem = TensorElement(f.source, {((x,),): ONE})
        a = f.apply(elem)
        b = g.apply(TensorElement(g.source, {((x,),): ONE})).with_sig(a.sig)
        diff = (a - b).normalized()
        diff.span = _max_span(a.span, b.span)
        zero = not diff.terms
        out.append(Comparison(x, diff, zero, diff.certainty()))
    return out


def equal_morphisms(f: Map, g: Map, generators: Iterable[str] | None = None) -> bool:
    results = compare_on_generators(f, g, generators)
    for r in results:
        if not r.equal:
            if r.certainty == BOUND_LIMITED:
                raise InconclusiveError(f"{f.name} vs {g.name} on {r.generator} is bound-limited")
            return False
    if any(r.certainty == BOUND_LIMITED for r in results):
        raise InconclusiveError(f"{f.name} vs {g.name}: bound-limited zero tests")
    return True
