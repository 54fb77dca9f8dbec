"""Rewriting-free dimension oracle.

The degree <= d truncation of a presented algebra is computed as the quotient
of the span of all words of degree <= d by the span of all shifted relations
``u * r * v`` whose degree stays <= d, using exact sparse row reduction over
Q(q).  Nothing here touches rule orientation or completion, so it serves as an
independent check on :func:`hgsys.engine.graded_dimension`.
"""
from __future__ import annotations

import time

from .engine import Budget, Element, Presentation, words_up_to
from .errors import BudgetExceeded
from .scalars import Scalar


class RowReducer:
    """Incremental echelon form over Q(q) with rows stored as {column: Scalar}."""

    def __init__(self):
        self.pivots: dict[int, dict[int, Scalar]] = {}

    def add(self, row: dict[int, Scalar]) -> bool:
        row = {k: v for k, v in row.items() if v}
        pivots = self.pivots
        while row:
            c = max(row)
            prow = pivots.get(c)
            if prow is None:
                inv = row[c].inverse()
                pivots[c] = {k: v * inv for k, v in row.items()}
                return True
            f = row[c]
            for k, v in prow.items():
                s = row.get(k)
                s = -f * v if s is None else s - f * v
                if s:
                    row[k] = s
                else:
                    row.pop(k, None)
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)


def relation_span_rows(pres: Presentation, degree: int, columns: dict, budget: Budget, start: float):
    names = pres.names
    wt = pres.weights
    shifts = words_up_to(names, wt, degree, limit=budget.max_words)
    by_deg: dict[int, list] = {}
    for w in shifts:
        by_deg.setdefault(pres.word_degree(w), []).append(w)
    for rel in pres.relations:
        if rel.is_zero():
            continue
        rdeg = rel.degree(wt)
        room = degree - rdeg
        if room < 0:
            continue
        for dl in range(room + 1):
            for left in by_deg.get(dl, ()):
                for dr in range(room - dl + 1):
                    for right in by_deg.get(dr, ()):
                        if time.monotonic() - start > budget.max_seconds:
                            raise BudgetExceeded(f"oracle on {pres.name} exceeded {budget.max_seconds}s")
                        yield {columns[left + w + right]: c for w, c in rel.terms.items()}


def bruteforce_dimension(pres: Presentation, degree: int, budget: Budget | None = None) -> int:
    """Dimension of the degree <= ``degree`` truncation, by linear algebra only."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    budget = budget or Budget()
    start = time.monotonic()
    # declaration order, deliberately unrelated to the rewriting precedence
    words = words_up_to(pres.names, pres.weights, degree, limit=budget.max_words)
    columns = {w: i for i, w in enumerate(words)}
    reducer = RowReducer()
    for row in relation_span_rows(pres, degree, columns, budget, start):
        reducer.add(row)
    return len(words) - reducer.rank


def in_truncated_ideal(pres: Presentation, e: Element, degree: int, budget: Budget | None = None) -> bool:
    """True when e lies in the span of shifted relations of degree <= ``degree``."""
    budget = budget or Budget()
    start = time.monotonic()
    words = words_up_to(pres.names, pres.weights, degree, limit=budget.max_words)
    columns = {w: i for i, w in enumerate(words)}
    for w in e.terms:
        if w not in columns:
            raise ValueError("element exceeds the requested degree")
    reducer = RowReducer()
    for row in relation_span_rows(pres, degree, columns, budget, start):
        reducer.add(row)
    return not reducer.add({columns[w]: c for w, c in e.terms.items()})
