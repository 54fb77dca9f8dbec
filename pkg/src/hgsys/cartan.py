"""Input data: symmetrizable Cartan data, Lie algebras with structure constants, 2-cocycles."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .errors import CocycleError, ValidationError


@dataclass(frozen=True)
class CartanDatum:
    matrix: tuple
    symmetrizers: tuple
    name: str = ""

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        d = tuple(int(x) for x in self.symmetrizers)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "symmetrizers", d)
        n = len(m)
        if n == 0:
            raise ValidationError("Cartan matrix must be nonempty")
        if any(len(row) != n for row in m):
            raise ValidationError("Cartan matrix must be square")
        if len(d) != n:
            raise ValidationError("one symmetrizer per index")
        for i in range(n):
            if m[i][i] != 2:
                raise ValidationError(f"a_{i + 1}{i + 1} must equal 2")
            if d[i] < 1:
                raise ValidationError(f"symmetrizer d_{i + 1} must be positive")
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                if m[i][j] > 0:
                    raise ValidationError(f"a_{i + 1}{j + 1} must be <= 0")
                if (m[i][j] == 0) != (m[j][i] == 0):
                    raise ValidationError(f"a_{i + 1}{j + 1} = 0 must match a_{j + 1}{i + 1} = 0")
                if d[i] * m[i][j] != d[j] * m[j][i]:
                    raise ValidationError(f"d_i a_ij != d_j a_ji for (i, j) = ({i + 1}, {j + 1})")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def indices(self) -> range:
        return range(1, self.rank + 1)

    def a(self, i: int, j: int) -> int:
        """<h_i, alpha_j>, 1-based."""
        return self.matrix[i - 1][j - 1]

    def d(self, i: int) -> int:
        return self.symmetrizers[i - 1]

    def label(self) -> str:
        return self.name or "cartan" + str(list(map(list, self.matrix)))

    def to_json(self):
        return {"matrix": [list(r) for r in self.matrix], "symmetrizers": list(self.symmetrizers)}


A1 = CartanDatum(((2,),), (1,), "A1")
A1xA1 = CartanDatum(((2, 0), (0, 2)), (1, 1), "A1xA1")
A2 = CartanDatum(((2, -1), (-1, 2)), (1, 1), "A2")
BUILTIN_DATA = {"A1": A1, "A1xA1": A1xA1, "A2": A2}


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class LieDatum:
    """Finite-dimensional Lie algebra over Q given on an ordered basis."""

    def __init__(self, basis, brackets: Mapping = (), name: str = "g"):
        self.basis = list(basis)
        self.name = name
        if len(set(self.basis)) != len(self.basis):
            raise ValidationError("duplicate basis names")
        self.pos = {b: i for i, b in enumerate(self.basis)}
        table: dict = {}
        items = brackets.items() if isinstance(brackets, Mapping) else brackets
        for (x, y), val in items:
            for v in (x, y):
                if v not in self.pos:
                    raise ValidationError(f"unknown basis element {v!r} in bracket")
            vec = {k: _frac(c) for k, c in dict(val).items() if _frac(c) != 0}
            for k in vec:
                if k not in self.pos:
                    raise ValidationError(f"unknown basis element {k!r} in bracket value")
            if x == y:
                if vec:
                    raise ValidationError(f"[{x}, {x}] must vanish")
                continue
            neg = {k: -c for k, c in vec.items()}
            if (y, x) in table and table[(y, x)] != neg:
                raise ValidationError(f"bracket not antisymmetric on ({x}, {y})")
            table[(x, y)] = vec
            table[(y, x)] = neg
        self.table = table
        self._check_jacobi()

    def bracket(self, x: str, y: str) -> dict:
        return dict(self.table.get((x, y), {}))

    def bracket_vec(self, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for x, a in u.items():
            for y, b in v.items():
                for z, c in self.table.get((x, y), {}).items():
                    out[z] = out.get(z, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    def _check_jacobi(self):
        for x, y, z in combinations(self.basis, 3):
            acc: dict = {}
            for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                inner = self.bracket(b, c)
                for k, v in self.bracket_vec({a: 1}, inner).items():
                    acc[k] = acc.get(k, 0) + v
            if any(acc.values()):
                raise ValidationError(f"Jacobi identity fails on ({x}, {y}, {z})")

    def to_json(self):
        return {
            "basis": self.basis,
            "brackets": [[x, y, {k: str(v) for k, v in sorted(vec.items())}]
                         for (x, y), vec in sorted(self.table.items())
                         if self.pos[x] < self.pos[y] and vec],
        }


class CocycleSpec:
    """Antisymmetric bilinear form on a Lie algebra basis, rational valued."""

    def __init__(self, lie: LieDatum, values: Mapping = (), check: bool = True):
        self.lie = lie
        vals: dict = {}
        items = values.items() if isinstance(values, Mapping) else values
        for (x, y), c in items:
            for v in (x, y):
                if v not in lie.pos:
                    raise ValidationError(f"unknown basis element {v!r} in cocycle")
            c = _frac(c)
            if x == y:
                if c:
                    raise ValidationError(f"c({x}, {x}) must vanish")
                continue
            if (y, x) in vals and vals[(y, x)] != -c:
                raise ValidationError(f"cocycle not antisymmetric on ({x}, {y})")
            vals[(x, y)] = c
            vals[(y, x)] = -c
        self.values = vals
        if check:
            bad = self.violation()
            if bad is not None:
                raise CocycleError(f"cocycle identity fails on {bad}", bad)

    def __call__(self, x: str, y: str) -> Fraction:
        return self.values.get((x, y), Fraction(0))

    def on_vectors(self, u: Mapping, v: Mapping) -> Fraction:
        return sum((a * b * self(x, y) for x, a in u.items() for y, b in v.items()), Fraction(0))

    def violation(self):
        lie = self.lie
        for x, y, z in combinations(lie.basis, 3):
            total = (self.on_vectors(lie.bracket(x, y), {z: 1})
                     + self.on_vectors(lie.bracket(y, z), {x: 1})
                     + self.on_vectors(lie.bracket(z, x), {y: 1}))
            if total:
                return (x, y, z)
        return None

    def negated(self) -> "CocycleSpec":
        return CocycleSpec(self.lie, {k: -v for k, v in self.values.items()}, check=False)

    def is_zero(self) -> bool:
        return not any(self.values.values())

    def to_json(self):
        pos = self.lie.pos
        return [[x, y, str(c)] for (x, y), c in sorted(self.values.items()) if pos[x] < pos[y] and c]


def abelian(basis, name="abelian") -> LieDatum:
    return LieDatum(basis, {}, name)


def heisenberg() -> LieDatum:
    return LieDatum(["x", "y", "z"], {("x", "y"): {"z": 1}}, "heisenberg")


def weyl_datum() -> tuple[LieDatum, CocycleSpec]:
    lie = abelian(["x", "y"], "abelian2")
    return lie, CocycleSpec(lie, {("x", "y"): 1})


def heisenberg_datum() -> tuple[LieDatum, CocycleSpec]:
    lie = heisenberg()
    return lie, CocycleSpec(lie, {("x", "y"): 1})
