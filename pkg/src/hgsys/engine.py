"""Free associative algebras over Q(q), presented quotients and rewriting.

Words are tuples of generator names.  Elements are finite linear combinations
of words.  A :class:`Presentation` is oriented into rewrite rules under a
degree-lexicographic order and completed (diamond lemma) up to a degree bound,
giving a :class:`CompletedSystem` that computes normal forms.
"""
from __future__ import annotations

import hashlib
import json
import logging
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import BudgetExceeded, InconclusiveError, OrientationError
from .scalars import ONE, ZERO, Scalar, as_scalar

log = logging.getLogger(__name__)

ENGINE_VERSION = 3
CONFLUENT = "confluent_up_to_bound"
SATURATED = "saturated_at_bound"
CERTAIN = "certain"
BOUND_LIMITED = "bound_limited"

Word = tuple  # tuple[str, ...]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int = 1

    def __post_init__(self):
        if not self.name:
            raise ValueError("generator name must be nonempty")
        if self.degree < 1:
            raise ValueError("generator degree must be positive")


class Element:
    """Finite map word -> nonzero Scalar.  Treated as immutable."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, Scalar] | None = None):
        if terms is None:
            self.terms = {}
        else:
            self.terms = {w: c for w, c in terms.items() if c}

    @classmethod
    def word(cls, w: Iterable[str], coeff=ONE) -> "Element":
        coeff = as_scalar(coeff)
        e = cls()
        if coeff:
            e.terms[tuple(w)] = coeff
        return e

    @classmethod
    def gen(cls, name: str) -> "Element":
        return cls.word((name,))

    @classmethod
    def scalar(cls, c) -> "Element":
        return cls.word((), c)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = _as_element(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return _raw(out)

    __radd__ = __add__

    def __neg__(self):
        return _raw({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_element(other))

    def __rsub__(self, other):
        return _as_element(other) - self

    def scale(self, c) -> "Element":
        c = as_scalar(c)
        if not c:
            return Element()
        return _raw({w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (Scalar, int)):
            return self.scale(other)
        other = _as_element(other)
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                s = out.get(w)
                s = c if s is None else s + c
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return _raw(out)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int)):
            return self.scale(other)
        return _as_element(other) * self

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self, weights: Mapping[str, int] | None = None) -> int:
        if not self.terms:
            return -1
        if weights is None:
            return max(len(w) for w in self.terms)
        return max(sum(weights[g] for g in w) for w in self.terms)

    def generators(self) -> set:
        return {g for w in self.terms for g in w}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def __str__(self):
        return render_element(self)

    def __repr__(self):
        return f"Element({self})"


def _raw(terms: dict) -> Element:
    e = Element.__new__(Element)
    e.terms = terms
    return e


def _as_element(x) -> Element:
    if isinstance(x, Element):
        return x
    return Element.scalar(as_scalar(x))


def render_word(w: Word) -> str:
    return "*".join(w) if w else "1"


def render_element(e: Element) -> str:
    if not e.terms:
        return "0"
    parts = []
    for w, c in e.sorted_terms():
        parts.append(f"({c})*{render_word(w)}" if w else f"({c})")
    return " + ".join(parts)


class Presentation:
    """Generators, relations (each understood as ``= 0``) and a precedence order."""

    def __init__(self, name: str, generators, relations, precedence=None, labels=None):
        self.name = name
        self.generators = [g if isinstance(g, Generator) else Generator(g) for g in generators]
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {name}")
        self.names = names
        self.weights = {g.name: g.degree for g in self.generators}
        self.relations = [r for r in relations]
        self.labels = list(labels) if labels is not None else [f"r{i}" for i in range(len(self.relations))]
        if len(self.labels) != len(self.relations):
            raise ValueError("one label per relation")
        self.precedence = list(precedence) if precedence is not None else list(names)
        known = set(names)
        for lab, r in zip(self.labels, self.relations):
            stray = r.generators() - known
            if stray:
                raise ValueError(f"relation {lab} of {name} uses undeclared generators {sorted(stray)}")
        self._hash = None

    def word_degree(self, w: Word) -> int:
        wt = self.weights
        return sum(wt[g] for g in w)

    def digest(self) -> str:
        if self._hash is None:
            payload = {
                "name": self.name,
                "generators": [[g.name, g.degree] for g in self.generators],
                "precedence": self.precedence,
                "relations": [
                    [[list(w), str(c)] for w, c in r.sorted_terms()] for r in self.relations
                ],
            }
            blob = json.dumps(payload, sort_keys=True).encode()
            self._hash = hashlib.sha256(blob).hexdigest()
        return self._hash

    def __repr__(self):
        return f"Presentation({self.name!r}, {len(self.generators)} gens, {len(self.relations)} rels)"


class DegLex:
    """Degree-lexicographic order; the leftmost differing letter decides."""

    def __init__(self, pres: Presentation):
        missing = set(pres.names) - set(pres.precedence)
        self.total = not missing
        n = len(pres.precedence)
        self.rank = {g: n - i for i, g in enumerate(pres.precedence)}
        self.weights = pres.weights

    def key(self, w: Word):
        rank = self.rank
        return (sum(self.weights[g] for g in w), tuple(rank.get(g, 0) for g in w))

    def leading(self, e: Element) -> Word:
        return max(e.terms, key=self.key)


@dataclass
class Rule:
    lead: Word
    rhs: Element
    origin: str = ""


def orient(pres: Presentation) -> list[Rule]:
    order = DegLex(pres)
    rules = []
    for label, rel in zip(pres.labels, pres.relations):
        if rel.is_zero():
            continue
        rules.append(_orient_element(rel, order, label))
    return rules


def _orient_element(rel: Element, order: DegLex, label: str) -> Rule:
    ranked = sorted(rel.terms, key=order.key, reverse=True)
    lead = ranked[0]
    if len(ranked) > 1 and order.key(ranked[1]) == order.key(lead):
        raise OrientationError(f"relation {label}: leading term not unique ({ranked[0]} vs {ranked[1]})")
    if not lead:
        raise OrientationError(f"relation {label}: nonzero constant relation collapses the algebra")
    c = rel.terms[lead]
    inv = -(c.inverse())
    rhs = _raw({w: v * inv for w, v in rel.terms.items() if w != lead})
    lk = order.key(lead)
    for w in rhs.terms:
        if not order.key(w) < lk:
            raise OrientationError(f"relation {label}: rule does not decrease the order")
    return Rule(lead, rhs, label)


@dataclass
class Budget:
    max_rules: int = 2000
    max_seconds: float = 300.0
    max_words: int = 200000


class CompletedSystem:
    """Rewrite rules plus the bookkeeping needed to reduce and certify."""

    def __init__(self, source: Presentation, rules: list[Rule], degree_bound: int, status: str,
                 added: int = 0):
        self.source = source
        self.degree_bound = degree_bound
        self.status = status
        self.added = added
        self.order = DegLex(source)
        self._set_rules(rules)

    def _set_rules(self, rules):
        self.rules = list(rules)
        self.table = {r.lead: r.rhs for r in self.rules}
        self.lengths = sorted({len(r.lead) for r in self.rules})
        self._memo: dict = {}

    def __repr__(self):
        return (f"CompletedSystem({self.source.name!r}, rules={len(self.rules)}, "
                f"bound={self.degree_bound}, status={self.status})")

    # reduction ------------------------------------------------------------
    def find(self, w: Word, rng: random.Random | None = None):
        """Locate a reducible subword: leftmost, or a random one when rng is given."""
        table = self.table
        n = len(w)
        hits = []
        for i in range(n):
            for L in self.lengths:
                if i + L > n:
                    break
                if w[i:i + L] in table:
                    if rng is None:
                        return i, L
                    hits.append((i, L))
        if hits:
            return rng.choice(hits)
        return None

    def reduce_word(self, w: Word) -> dict:
        memo = self._memo
        hit = memo.get(w)
        if hit is not None:
            return hit
        loc = self.find(w)
        if loc is None:
            out = {w: ONE}
        else:
            i, L = loc
            pre, post = w[:i], w[i + L:]
            out = {}
            for u, c in self.table[w[i:i + L]].terms.items():
                for v, d in self.reduce_word(pre + u + post).items():
                    s = out.get(v)
                    s = c * d if s is None else s + c * d
                    if s:
                        out[v] = s
                    else:
                        out.pop(v, None)
        memo[w] = out
        return out

    def normal_form(self, e: Element, strategy: str = "leftmost", rng: random.Random | None = None,
                    check_decrease: bool = False) -> Element:
        if strategy == "leftmost" and not check_decrease:
            out: dict = {}
            for w, c in e.terms.items():
                for v, d in self.reduce_word(w).items():
                    s = out.get(v)
                    s = c * d if s is None else s + c * d
                    if s:
                        out[v] = s
                    else:
                        out.pop(v, None)
            return _raw(out)
        return self._normal_form_stepwise(e, rng or random.Random(0), strategy, check_decrease)

    def _normal_form_stepwise(self, e, rng, strategy, check_decrease):
        key = self.order.key
        cur = dict(e.terms)
        done: dict = {}
        while cur:
            if strategy == "random":
                w = rng.choice(sorted(cur, key=key))
            else:
                w = max(cur, key=key)
            c = cur.pop(w)
            loc = self.find(w, rng if strategy == "random" else None)
            if loc is None:
                s = done.get(w)
                s = c if s is None else s + c
                if s:
                    done[w] = s
                else:
                    done.pop(w, None)
                continue
            i, L = loc
            for u, d in self.table[w[i:i + L]].terms.items():
                v = w[:i] + u + w[i + L:]
                if check_decrease:
                    assert key(v) < key(w), f"rewrite step {w} -> {v} does not decrease"
                target = done if v in done else cur
                s = target.get(v)
                s = c * d if s is None else s + c * d
                if s:
                    target[v] = s
                else:
                    target.pop(v, None)
        return _raw(done)

    def element_degree(self, e: Element) -> int:
        return e.degree(self.source.weights)

    def is_zero(self, e: Element) -> tuple[bool, str]:
        nf = self.normal_form(e)
        return nf.is_zero(), self.certainty(self.element_degree(e))

    def certainty(self, degree: int) -> str:
        if self.status == SATURATED and degree >= self.degree_bound:
            return BOUND_LIMITED
        return CERTAIN

    def is_irreducible(self, w: Word) -> bool:
        return self.find(w) is None

    # serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "engine_version": ENGINE_VERSION,
            "presentation_hash": self.source.digest(),
            "precedence": self.source.precedence,
            "degree_bound": self.degree_bound,
            "status": self.status,
            "added": self.added,
            "rules": [
                {"lead": list(r.lead), "origin": r.origin,
                 "rhs": [[list(w), str(c)] for w, c in r.rhs.sorted_terms()]}
                for r in self.rules
            ],
        }

    @classmethod
    def from_json(cls, pres: Presentation, data: dict) -> "CompletedSystem":
        if data.get("engine_version") != ENGINE_VERSION:
            raise ValueError("engine version mismatch")
        if data.get("presentation_hash") != pres.digest():
            raise ValueError("presentation hash mismatch")
        rules = []
        for r in data["rules"]:
            rhs = Element({tuple(w): Scalar.parse(c) for w, c in r["rhs"]})
            rules.append(Rule(tuple(r["lead"]), rhs, r.get("origin", "")))
        return cls(pres, rules, data["degree_bound"], data["status"], data.get("added", 0))


def _overlaps(a: Word, b: Word):
    """Words on which leads a and b both act (a on the left)."""
    la, lb = len(a), len(b)
    for k in range(1, min(la, lb)):
        if a[la - k:] == b[:k]:
            yield a + b[k:], (0, la), (la - k, lb)
    if lb < la:
        for i in range(0, la - lb + 1):
            if a[i:i + lb] == b:
                yield a, (0, la), (i, lb)


def complete(pres: Presentation, degree_bound: int = 8, budget: Budget | None = None) -> CompletedSystem:
    """Diamond-lemma completion, resolving every ambiguity of degree <= degree_bound."""
    if degree_bound < 1:
        raise ValueError("degree_bound must be positive")
    budget = budget or Budget()
    start = time.monotonic()
    initial = orient(pres)
    system = CompletedSystem(pres, [], degree_bound, CONFLUENT)
    order = system.order
    rules: list[Rule] = []
    pending: list[tuple[int, int]] = []
    exceeded = False
    added = 0

    def push(rel: Element, origin: str, fresh: bool):
        nonlocal added
        nf = system.normal_form(rel)
        if nf.is_zero():
            return
        rule = _orient_element(nf, order, origin)
        rules.append(rule)
        if fresh:
            added += 1
        if len(rules) > budget.max_rules:
            raise BudgetExceeded(f"completion of {pres.name} exceeded {budget.max_rules} rules")
        system._set_rules(rules)
        j = len(rules) - 1
        for i in range(len(rules)):
            pending.append((i, j))
            if i != j:
                pending.append((j, i))

    for r in initial:
        push(r.rhs - Element.word(r.lead), r.origin, fresh=False)
    # sort so that low-degree ambiguities are resolved first
    while pending:
        if time.monotonic() - start > budget.max_seconds:
            raise BudgetExceeded(f"completion of {pres.name} exceeded {budget.max_seconds}s")
        pending.sort(key=lambda ij: -_pair_degree(rules, ij, pres))
        i, j = pending.pop()
        if i >= len(rules) or j >= len(rules):
            continue
        a, b = rules[i], rules[j]
        if a.lead not in system.table or system.table[a.lead] is not a.rhs:
            continue
        if b.lead not in system.table or system.table[b.lead] is not b.rhs:
            continue
        for w, (ia, la), (ib, lb) in _overlaps(a.lead, b.lead):
            if pres.word_degree(w) > degree_bound:
                exceeded = True
                continue
            left = Element({w[:ia] + u + w[ia + la:]: c for u, c in a.rhs.terms.items()})
            right = Element({w[:ib] + u + w[ib + lb:]: c for u, c in b.rhs.terms.items()})
            diff = system.normal_form(left) - system.normal_form(right)
            if not diff.is_zero():
                push(diff, f"overlap {render_word(w)}", fresh=True)
    status = SATURATED if exceeded else CONFLUENT
    system.status = status
    system.added = added
    log.debug("completed %s: %d rules (%d added), status %s", pres.name, len(rules), added, status)
    return system


def _pair_degree(rules, ij, pres):
    i, j = ij
    if i >= len(rules) or j >= len(rules):
        return 0
    return pres.word_degree(rules[i].lead) + pres.word_degree(rules[j].lead)


def words_up_to(names: list[str], weights: Mapping[str, int], degree: int, limit: int | None = None):
    """All words of weighted degree <= degree, shortest first, in declaration order."""
    out = [()]
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for w, d in frontier:
            for g in names:
                dg = d + weights[g]
                if dg <= degree:
                    v = w + (g,)
                    out.append(v)
                    nxt.append((v, dg))
                    if limit is not None and len(out) > limit:
                        raise BudgetExceeded(f"more than {limit} words up to degree {degree}")
        frontier = nxt
    return out


def graded_dimension(system: CompletedSystem, degree: int) -> int:
    """Number of irreducible words of degree <= degree."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if system.status != CONFLUENT and system.degree_bound < degree:
        raise InconclusiveError(
            f"{system.source.name}: completion bound {system.degree_bound} below degree {degree}")
    if system.status != CONFLUENT:
        raise InconclusiveError(f"{system.source.name}: completion saturated at bound {system.degree_bound}")
    pres = system.source
    count = 1
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for w, d in frontier:
            for g in pres.names:
                dg = d + pres.weights[g]
                if dg > degree:
                    continue
                v = w + (g,)
                if _suffix_reducible(system, v):
                    continue
                count += 1
                nxt.append((v, dg))
        frontier = nxt
    return count


def irreducible_words(system: CompletedSystem, degree: int) -> list:
    pres = system.source
    out = [()]
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for w, d in frontier:
            for g in pres.names:
                dg = d + pres.weights[g]
                if dg > degree:
                    continue
                v = w + (g,)
                if _suffix_reducible(system, v):
                    continue
                out.append(v)
                nxt.append((v, dg))
        frontier = nxt
    return out


def _suffix_reducible(system, v):
    table = system.table
    n = len(v)
    for L in system.lengths:
        if L > n:
            break
        if v[n - L:] in table:
            return True
    return False


def is_zero(e: Element, system: CompletedSystem) -> tuple[bool, str]:
    return system.is_zero(e)


def normal_form(e: Element, system: CompletedSystem) -> Element:
    return system.normal_form(e)
