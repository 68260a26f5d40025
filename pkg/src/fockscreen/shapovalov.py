"""Brute-force Virasoro Verma-module oracle.

Graded dimensions of the irreducible quotient L(c, h) are the ranks of
the Shapovalov Gram matrices, computed exactly over the rationals from
the Virasoro commutation relations.  This is the independent check of
the closed-form characters used elsewhere: it knows nothing about free
fields, screenings or embedding diagrams.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import rref

Q = Fraction


def _partitions(n: int):
    """Partitions of n as descending tuples, lexicographically sorted."""
    out = []

    def rec(remaining, max_part, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for j in range(min(max_part, remaining), 0, -1):
            rec(remaining - j, j, acc + [j])

    rec(n, n, [])
    return sorted(out)


class VermaModule:
    """Verma module of the Virasoro algebra at central charge c, weight h."""

    def __init__(self, c, h):
        self.c = Q(c)
        self.h = Q(h)
        self._cache = {}

    def apply_raising(self, n: int, states: dict) -> dict:
        """L(n) (n >= 1) applied to {partition: coeff} over L(-part)|h>."""
        out = {}
        for part, coeff in states.items():
            for p2, c2 in self._apply_one(n, part).items():
                out[p2] = out.get(p2, Q(0)) + coeff * c2
        return {k: v for k, v in out.items() if v}

    def _create(self, m: int, part: tuple) -> dict:
        """L(-m) applied to the PBW state L(-part)|h>, re-ordered to PBW.

        PBW order is descending; [L(-m), L(-l)] = (l - m) L(-m-l).
        """
        key = ("c", m, part)
        got = self._cache.get(key)
        if got is not None:
            return got
        if not part or m >= part[0]:
            out = {(m,) + part: Q(1)}
        else:
            l, rest = part[0], part[1:]
            out = {}
            for p2, c2 in self._create(m, rest).items():
                for p3, c3 in self._create(l, p2).items():
                    out[p3] = out.get(p3, Q(0)) + c2 * c3
            for p2, c2 in self._create(m + l, rest).items():
                out[p2] = out.get(p2, Q(0)) + (l - m) * c2
            out = {k2: v for k2, v in out.items() if v}
        self._cache[key] = out
        return out

    def _apply_one(self, n: int, part: tuple) -> dict:
        key = ("a", n, part)
        got = self._cache.get(key)
        if got is not None:
            return got
        out = {}
        if part:
            m, rest = part[0], part[1:]
            # [L(n), L(-m)] = (n + m) L(n - m) + c/12 (n^3 - n) delta_{n,m}
            k = n - m
            if k < 0:
                for p2, c2 in self._create(-k, rest).items():
                    out[p2] = out.get(p2, Q(0)) + (n + m) * c2
            elif k == 0:
                ev = self.h + sum(rest)
                out[rest] = out.get(rest, Q(0)) + (n + m) * ev
            else:
                for p2, c2 in self._apply_one(k, rest).items():
                    out[p2] = out.get(p2, Q(0)) + (n + m) * c2
            if n == m:
                central = self.c / 12 * (n ** 3 - n)
                if central:
                    out[rest] = out.get(rest, Q(0)) + central
            # pass L(n) through: L(-m) L(n) rest
            for p2, c2 in self._apply_one(n, rest).items():
                for p3, c3 in self._create(m, p2).items():
                    out[p3] = out.get(p3, Q(0)) + c2 * c3
        out = {k2: v for k2, v in out.items() if v}
        self._cache[key] = out
        return out

    def gram_entry(self, lam: tuple, mu: tuple) -> Fraction:
        """<L(-lam)|h>, L(-mu)|h>> with <h|h> = 1."""
        states = {mu: Q(1)}
        for n in lam:
            states = self.apply_raising(n, states)
            if not states:
                return Q(0)
        return states.get((), Q(0))

    def gram_matrix(self, level: int):
        parts = _partitions(level)
        return [[self.gram_entry(la, mu) for mu in parts] for la in parts]

    def irreducible_dims(self, max_level: int):
        """dim L(c,h) at levels 0..max_level (rank of the Gram form)."""
        dims = [1]
        for lev in range(1, max_level + 1):
            g = self.gram_matrix(lev)
            _, pivots = rref(g)
            dims.append(len(pivots))
        return dims
