"""Rational quadratic spaces, lattice vectors and sign cocycles.

Everything is exact: coordinates and pairings are `fractions.Fraction`,
signs are honest ±1 integers.  A `QuadSpace` is a named basis together
with a symmetric Gram matrix; vectors are coordinate tuples over that
basis.  Vertex-operator sectors are glued with a bimultiplicative ±1
cocycle defined on pairs of vectors whose pairing is an integer.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NonIntegralPairing, NotInSpan

Q = Fraction  # local alias, used heavily


def _as_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class QuadSpace:
    """A finite-dimensional rational vector space with a symmetric pairing."""

    def __init__(self, basis_names: Sequence[str], gram: Sequence[Sequence]):
        self.basis_names = tuple(basis_names)
        n = len(self.basis_names)
        g = tuple(tuple(_as_frac(x) for x in row) for row in gram)
        if len(g) != n or any(len(row) != n for row in g):
            raise DimensionMismatch("gram matrix shape does not match basis")
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        self.gram = g
        self.dim = n
        self._pair_cache = {}

    def basis_vector(self, name: str) -> "LatticeVector":
        i = self.basis_names.index(name)
        coords = tuple(Q(1) if j == i else Q(0) for j in range(self.dim))
        return LatticeVector(self, coords)

    def zero(self) -> "LatticeVector":
        return LatticeVector(self, (Q(0),) * self.dim)

    def vector(self, coords: Iterable) -> "LatticeVector":
        return LatticeVector(self, tuple(_as_frac(x) for x in coords))

    def pair(self, v: "LatticeVector", w: "LatticeVector") -> Fraction:
        if v.space is not self or w.space is not self:
            raise DimensionMismatch("vectors from different spaces")
        key = (v.coords, w.coords)
        got = self._pair_cache.get(key)
        if got is not None:
            return got
        total = Q(0)
        for i, vi in enumerate(v.coords):
            if not vi:
                continue
            row = self.gram[i]
            for j, wj in enumerate(w.coords):
                if wj and row[j]:
                    total += vi * row[j] * wj
        self._pair_cache[key] = total
        return total

    def to_json(self) -> dict:
        return {
            "basis": list(self.basis_names),
            "gram": [[[x.numerator, x.denominator] for x in row] for row in self.gram],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuadSpace":
        gram = [[Fraction(a, b) for a, b in row] for row in data["gram"]]
        return cls(data["basis"], gram)

    def __repr__(self):
        return f"QuadSpace({', '.join(self.basis_names)})"


class LatticeVector:
    """A rational-coordinate vector in a fixed QuadSpace."""

    __slots__ = ("space", "coords")

    def __init__(self, space: QuadSpace, coords: tuple):
        if len(coords) != space.dim:
            raise DimensionMismatch("coordinate length does not match space")
        self.space = space
        self.coords = coords

    def pair(self, other: "LatticeVector") -> Fraction:
        return self.space.pair(self, other)

    def norm(self) -> Fraction:
        return self.pair(self)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coords)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        if other.space is not self.space:
            raise DimensionMismatch("vectors from different spaces")
        return LatticeVector(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        if other.space is not self.space:
            raise DimensionMismatch("vectors from different spaces")
        return LatticeVector(self.space, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(self.space, tuple(-a for a in self.coords))

    def __mul__(self, scalar) -> "LatticeVector":
        s = _as_frac(scalar)
        return LatticeVector(self.space, tuple(s * a for a in self.coords))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LatticeVector)
            and other.space is self.space
            and other.coords == self.coords
        )

    def __hash__(self):
        return hash(self.coords)

    def to_json(self) -> dict:
        return {"coords": [[x.numerator, x.denominator] for x in self.coords]}

    @classmethod
    def from_json(cls, space: QuadSpace, data: dict) -> "LatticeVector":
        return cls(space, tuple(Fraction(a, b) for a, b in data["coords"]))

    def __repr__(self):
        parts = []
        for name, x in zip(self.space.basis_names, self.coords):
            if x:
                parts.append(f"{x}*{name}")
        return "(" + (" + ".join(parts) if parts else "0") + ")"


def change_basis(v: LatticeVector, target: Sequence[LatticeVector]) -> tuple:
    """Coordinates of `v` in the span of `target`, exact.

    Raises NotInSpan if `v` is outside the span.  Round trip through the
    returned coordinates reproduces `v` exactly.
    """
    space = v.space
    cols = [t.coords for t in target]
    n, m = space.dim, len(cols)
    # Solve sum_j x_j * cols[j] == v.coords by Gaussian elimination.
    aug = [[cols[j][i] for j in range(m)] + [v.coords[i]] for i in range(n)]
    piv_rows = []
    r = 0
    for c in range(m):
        pivot = None
        for i in range(r, n):
            if aug[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_rows.append((r, c))
        r += 1
    for i in range(n):
        if all(aug[i][c] == 0 for c in range(m)) and aug[i][m] != 0:
            raise NotInSpan(f"{v!r} not in span of target basis")
    out = [Q(0)] * m
    for row, col in piv_rows:
        out[col] = aug[row][m]
    return tuple(out)


class SignCocycle:
    """Bimultiplicative ±1 two-cocycle on integral-pairing sectors.

    Base rule on the ordered basis: eps(e_i, e_j) = 1 for i <= j and
    (-1)^<e_i,e_j> otherwise, extended bimultiplicatively to rational
    spans.  An optional symmetric twist (-1)^{q(u) q(v)} by an integral
    charge functional `twist` yields a second admissible cocycle: the
    twist is symmetric and bimultiplicative, so every antisymmetry ratio
    eps(u,v)/eps(v,u) is unchanged.
    """

    def __init__(self, space: QuadSpace, twist: LatticeVector | None = None):
        self.space = space
        self.twist = twist
        self._lower = []  # (i, j, gram_ij) with i > j and gram_ij != 0
        for i in range(space.dim):
            for j in range(i):
                if space.gram[i][j]:
                    self._lower.append((i, j, space.gram[i][j]))

    def _check_int(self, x: Fraction, what: str) -> int:
        if x.denominator != 1:
            raise NonIntegralPairing(f"{what} = {x} is not an integer")
        return x.numerator

    def value(self, u: LatticeVector, v: LatticeVector) -> int:
        """The sign eps(u, v).

        Well-defined whenever the basis-rule exponent and the twist
        charges are integers; sectors with fractional mutual pairing
        still get a sign (their mode structure is handled by the
        operator layer, which knows which z-powers exist).
        """
        exponent = Q(0)
        for i, j, gij in self._lower:
            exponent += gij * u.coords[i] * v.coords[j]
        e = self._check_int(exponent, "cocycle exponent")
        sign = -1 if e % 2 else 1
        if self.twist is not None:
            qu = self._check_int(self.space.pair(self.twist, u), "twist charge q(u)")
            qv = self._check_int(self.space.pair(self.twist, v), "twist charge q(v)")
            if (qu * qv) % 2:
                sign = -sign
        return sign

    def value_strict(self, u: LatticeVector, v: LatticeVector) -> int:
        """eps(u, v) with the integral-pairing precondition enforced."""
        self._check_int(self.space.pair(u, v), "<u,v>")
        return self.value(u, v)


def koszul_sign(u: LatticeVector, v: LatticeVector) -> int:
    """Statistics sign (-1)^{<u,u><v,v>} between momentum sectors.

    A sector with even integral norm is bosonic and commutes with
    everything, even when the other norm is non-integral.  Two sectors
    of odd integral norm anticommute.  If neither norm settles the
    parity the statistics are undefined and we refuse.
    """

    def parity(x: Fraction):
        return x.numerator % 2 if x.denominator == 1 else None

    pu, pv = parity(u.norm()), parity(v.norm())
    if pu == 0 or pv == 0:
        return 1
    if pu == 1 and pv == 1:
        return -1
    raise NonIntegralPairing(
        f"statistics undefined for norms {u.norm()}, {v.norm()}"
    )


def vector_to_json_str(v: LatticeVector) -> str:
    payload = v.space.to_json()
    payload.update(v.to_json())
    return json.dumps(payload, sort_keys=True)
