"""Windowed Fock modules over a Heisenberg algebra with lattice momenta.

A `FockModuleSpec` is a coset of momenta (base + integer span of
generators) inside a rational quadratic space, a list of oscillator
directions, a conformal structure fixing the weight of each momentum,
and a list of charge functionals.  A `Window` (weight cap plus charge
intervals) cuts a finite graded basis out of the module; enumeration is
exact and the admissibility of a window is checked constructively.

Basis states are kept as plain hashable tuples so they can key sparse
matrices: (momentum coordinates, sorted excitation multiset).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import NamedTuple, Sequence

from .errors import UnboundedWindow
from .qlattice import LatticeVector, QuadSpace

Q = Fraction


class BasisState(NamedTuple):
    """A Heisenberg monomial applied to a momentum vector.

    `momentum` is the coordinate tuple in the ambient basis; `exc` is a
    sorted tuple of (oscillator index, mode depth) pairs, repeats allowed.
    """

    momentum: tuple
    exc: tuple

    def depth(self) -> int:
        return sum(n for _, n in self.exc)


@dataclass(frozen=True)
class ConformalSpec:
    """Quadratic conformal vector with a linear shift.

    The quadratic part is the inverse-pairing normalization on the whole
    space; only the shift varies between gradings.  Convention, fixed
    project-wide: weight(e^lam) = <lam,lam>/2 - <shift,lam>.
    """

    space: QuadSpace
    shift: LatticeVector

    def momentum_weight(self, lam: LatticeVector) -> Fraction:
        return lam.norm() / 2 - self.shift.pair(lam)


@dataclass(frozen=True)
class Window:
    """Weight cap plus per-charge closed intervals."""

    max_weight: Fraction
    charge_bounds: tuple = ()  # tuple of (name, lo, hi)

    @staticmethod
    def make(max_weight, bounds: dict | None = None) -> "Window":
        items = tuple(
            (name, Q(lo), Q(hi)) for name, (lo, hi) in sorted((bounds or {}).items())
        )
        return Window(Q(max_weight), items)

    def bound_for(self, name: str):
        for n, lo, hi in self.charge_bounds:
            if n == name:
                return (lo, hi)
        return None

    def shrink(self, weight_by=0, charge_by: dict | None = None) -> "Window":
        charge_by = charge_by or {}
        items = tuple(
            (name, lo + Q(charge_by.get(name, 0)), hi - Q(charge_by.get(name, 0)))
            for name, lo, hi in self.charge_bounds
        )
        return Window(self.max_weight - Q(weight_by), items)


@dataclass(frozen=True)
class FockModuleSpec:
    """A momentum coset with oscillators, conformal grading and charges.

    `osc` is the oscillator basis shared by every tower of one
    computation (states key excitations by index into it); `active`
    lists the indices this particular module actually excites.
    """

    space: QuadSpace
    momentum_base: LatticeVector
    momentum_gens: tuple  # tuple[LatticeVector]
    osc: tuple  # tuple[LatticeVector], shared oscillator basis
    conformal: ConformalSpec
    charges: tuple  # tuple[(name, LatticeVector)]
    active: tuple = None  # indices into osc; None means all

    def active_indices(self) -> tuple:
        return tuple(range(len(self.osc))) if self.active is None else self.active

    def charge_vector(self, name: str) -> LatticeVector:
        for n, v in self.charges:
            if n == name:
                return v
        raise KeyError(name)

    def momentum_vector(self, state: BasisState) -> LatticeVector:
        return LatticeVector(self.space, state.momentum)

    def weight_of(self, state: BasisState) -> Fraction:
        lam = self.momentum_vector(state)
        return self.conformal.momentum_weight(lam) + state.depth()

    def charges_of(self, state: BasisState) -> tuple:
        lam = self.momentum_vector(state)
        return tuple(v.pair(lam) for _, v in self.charges)

    def charge_of(self, state: BasisState, name: str) -> Fraction:
        return self.charge_vector(name).pair(self.momentum_vector(state))

    def contains_momentum(self, lam: LatticeVector) -> bool:
        try:
            self._coset_coords(lam)
        except ValueError:
            return False
        return True

    def _coset_coords(self, lam: LatticeVector) -> tuple:
        """Integer coordinates of lam - base over the generators."""
        from .qlattice import change_basis
        from .errors import NotInSpan

        diff = lam - self.momentum_base
        if not self.momentum_gens:
            if diff.is_zero():
                return ()
            raise ValueError("momentum outside coset")
        try:
            coords = change_basis(diff, self.momentum_gens)
        except NotInSpan:
            raise ValueError("momentum outside coset") from None
        if any(x.denominator != 1 for x in coords):
            raise ValueError("momentum outside coset")
        # change_basis guarantees exact reconstruction only on the span;
        # verify residual is zero when generators do not span `diff`.
        recon = self.momentum_base
        for x, g in zip(coords, self.momentum_gens):
            recon = recon + x * g
        if recon != lam:
            raise ValueError("momentum outside coset")
        return tuple(int(x) for x in coords)

    # -- momentum enumeration ------------------------------------------------

    def enumerate_momenta(self, win: Window) -> list:
        """All coset momenta admitted by `win`, sorted by coordinates.

        Raises UnboundedWindow when the window fails to pin down every
        generator direction (e.g. an isotropic direction with no charge
        functional cutting it).
        """
        gens = self.momentum_gens
        r = len(gens)
        if r == 0:
            lam = self.momentum_base
            if self._momentum_ok(lam, win):
                return [lam]
            return []
        pair = self.space.pair
        A = [[pair(gi, gj) for gj in gens] for gi in gens]
        for i in range(r):
            for j in range(r):
                if i != j and A[i][j] != 0:
                    raise UnboundedWindow(
                        "momentum generators must be mutually orthogonal"
                    )
        s = self.conformal.shift
        b = [pair(g, self.momentum_base) - pair(s, g) for g in gens]
        c0 = self.conformal.momentum_weight(self.momentum_base)
        lin = []  # constraints sum a_i n_i <= rhs
        for name, lo, hi in win.charge_bounds:
            qv = self.charge_vector(name)
            coeffs = tuple(pair(qv, g) for g in gens)
            q0 = pair(qv, self.momentum_base)
            lin.append((coeffs, hi - q0))
            lin.append((tuple(-x for x in coeffs), q0 - lo))
        box = _solve_box(A, b, win.max_weight - c0, lin, r)
        out = []
        for pt in _iter_box(box):
            lam = self.momentum_base
            for ni, g in zip(pt, gens):
                if ni:
                    lam = lam + ni * g
            if self._momentum_ok(lam, win):
                out.append(lam)
        out.sort(key=lambda v: v.coords)
        return out

    def _momentum_ok(self, lam: LatticeVector, win: Window) -> bool:
        if self.conformal.momentum_weight(lam) > win.max_weight:
            return False
        for name, lo, hi in win.charge_bounds:
            x = self.charge_vector(name).pair(lam)
            if x < lo or x > hi:
                return False
        return True

    # -- basis enumeration ----------------------------------------------------

    def enumerate_basis(self, win: Window) -> list:
        """All BasisStates in the window, in canonical order.

        Order: momentum coordinates lexicographic, then excitation tuple
        lexicographic.  Stable across runs and platforms.
        """
        states = []
        act = self.active_indices()
        for lam in self.enumerate_momenta(win):
            budget = win.max_weight - self.conformal.momentum_weight(lam)
            if budget < 0:
                continue
            for exc in _colored_multisets(int(budget), len(act)):
                mapped = tuple(sorted((act[c], d) for c, d in exc))
                states.append(BasisState(lam.coords, mapped))
        states.sort(key=lambda st: (st.momentum, st.exc))
        return states

    def graded_dimension(self, win: Window) -> dict:
        """Table {(weight, charges): dim} without materializing states."""
        ncolors = len(self.active_indices())
        table: dict = {}
        for lam in self.enumerate_momenta(win):
            w0 = self.conformal.momentum_weight(lam)
            ch = tuple(v.pair(lam) for _, v in self.charges)
            budget = int(win.max_weight - w0)
            counts = _colored_partition_counts(budget, ncolors)
            for n in range(budget + 1):
                key = (w0 + n, ch)
                table[key] = table.get(key, 0) + counts[n]
        return table


def graded_dimension_csv(spec: FockModuleSpec, win: Window) -> str:
    """CSV export of a graded-dimension table: weight, charges..., dim."""
    table = spec.graded_dimension(win)
    buf = io.StringIO()
    writer = csv.writer(buf)
    names = [name for name, _ in spec.charges]
    writer.writerow(["weight"] + names + ["dim"])
    for (w, ch), dim in sorted(table.items()):
        writer.writerow([str(w)] + [str(x) for x in ch] + [dim])
    return buf.getvalue()


# -- integer point helpers ---------------------------------------------------


def _colored_multisets(max_total: int, ncolors: int):
    """Sorted tuples of (color, depth) pairs with total depth <= max_total."""
    out = [()]
    pairs = [(c, d) for c in range(ncolors) for d in range(1, max_total + 1)]

    def rec(start: int, remaining: int, acc: tuple):
        for idx in range(start, len(pairs)):
            c, d = pairs[idx]
            if d > remaining:
                continue
            item = acc + ((c, d),)
            out.append(item)
            rec(idx, remaining - d, item)

    if max_total > 0 and ncolors > 0:
        rec(0, max_total, ())
    return [tuple(sorted(t)) for t in out]


def _colored_partition_counts(n_max: int, ncolors: int, _cache={}):
    """counts[n] = number of ncolors-colored partitions of n."""
    key = ncolors
    table = _cache.setdefault(key, [1])
    while len(table) <= n_max:
        n = len(table)
        # Euler: n*p(n) = sum_{k=1..n} sigma(k)*ncolors*p(n-k) for colored
        total = 0
        for k in range(1, n + 1):
            sigma = sum(d for d in range(1, k + 1) if k % d == 0)
            total += ncolors * sigma * table[n - k]
        table.append(total // n)
    return table


def _term_min_int(a: Fraction, b: Fraction, interval):
    """Exact min of a*n^2/2 + b*n over integers in `interval` (or all of Z)."""
    lo, hi = interval if interval else (None, None)

    def val(n):
        return a * n * n / 2 + b * n

    if a > 0:
        v = -b / a
        cands = [_floor(v), _ceil(v)]
        cands = [n for n in cands if _in(n, lo, hi)]
        if not cands:
            cands = [x for x in (lo, hi) if x is not None]
        if not cands:
            return None
        return min(val(n) for n in cands)
    if a == 0:
        if b == 0:
            return Q(0)
        if b > 0:
            return val(lo) if lo is not None else None
        return val(hi) if hi is not None else None
    # a < 0: minimum at interval ends only
    if lo is None or hi is None:
        return None
    return min(val(lo), val(hi))


def _in(n, lo, hi):
    return (lo is None or n >= lo) and (hi is None or n <= hi)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _quad_int_interval(a: Fraction, b: Fraction, rhs: Fraction):
    """Integer solutions of a*n^2/2 + b*n <= rhs for a > 0.

    Returns (lo, hi) or 'empty'.  Exact: expands outward from the vertex.
    """
    disc = b * b + 2 * a * rhs
    if disc < 0:
        return "empty"
    vertex = -b / a

    def ok(n):
        return a * n * n / 2 + b * n <= rhs

    n0 = _floor(vertex)
    if not ok(n0):
        n0 += 1
        if not ok(n0):
            return "empty"
    # grow upward
    step = 1
    hi = n0
    while ok(hi + step):
        hi += step
        step *= 2
    while step > 1:
        step //= 2
        if ok(hi + step):
            hi += step
    step = 1
    lo = n0
    while ok(lo - step):
        lo -= step
        step *= 2
    while step > 1:
        step //= 2
        if ok(lo - step):
            lo -= step
    return (lo, hi)


def _solve_box(A, b, wcap: Fraction, lin, r: int):
    """Finite integer box containing all solutions, or UnboundedWindow.

    Constraints: sum_i (A[i][i] n_i^2/2 + b_i n_i) <= wcap (A diagonal)
    together with the linear constraints `lin`.  Bounds come from
    Fourier-Motzkin elimination in which the weight row participates:
    scaling and adding keeps its diagonal quadratic terms intact, and a
    quadratic term in a variable being eliminated is replaced by its
    exact minimum (a sound relaxation).
    """
    intervals = [None] * r

    def rows_now():
        # rows are (quad: list, lin: list, rhs): sum q_i n_i^2/2 + l_i n_i <= rhs
        rows = [([Q(0)] * r, list(c), Q(rhs)) for c, rhs in lin]
        rows.append(([A[i][i] for i in range(r)], list(b), Q(wcap)))
        for i in range(r):
            if intervals[i] is None:
                continue
            lo, hi = intervals[i]
            if hi is not None:
                l2 = [Q(0)] * r
                l2[i] = Q(1)
                rows.append(([Q(0)] * r, l2, Q(hi)))
            if lo is not None:
                l2 = [Q(0)] * r
                l2[i] = Q(-1)
                rows.append(([Q(0)] * r, l2, Q(-lo)))
        return rows

    def bound_var(i):
        rows = rows_now()
        for j in range(r):
            if j == i:
                continue
            # relax away quadratic j-terms, then eliminate j linearly
            relaxed = []
            for quad, linv, rhs in rows:
                if quad[j] != 0:
                    mn = _term_min_int(A[j][j], linv[j], intervals[j])
                    if mn is None:
                        continue  # row cannot help bound i this round
                    quad = list(quad)
                    linv = list(linv)
                    quad[j] = Q(0)
                    linv[j] = Q(0)
                    rhs = rhs - mn
                relaxed.append((quad, linv, rhs))
            pos = [row for row in relaxed if row[1][j] > 0]
            neg = [row for row in relaxed if row[1][j] < 0]
            zero = [row for row in relaxed if row[1][j] == 0]
            rows = list(zero)
            for qp, lp, rp in pos:
                for qn, ln, rn in neg:
                    sp, sn = -ln[j], lp[j]
                    rows.append(
                        (
                            [sp * a + sn * c for a, c in zip(qp, qn)],
                            [sp * a + sn * c for a, c in zip(lp, ln)],
                            sp * rp + sn * rn,
                        )
                    )
        lo, hi = None, None
        for quad, linv, rhs in rows:
            qi, li = quad[i], linv[i]
            if qi > 0:
                got = _quad_int_interval(qi, li, rhs)
                if got == "empty":
                    return "empty"
                lo = got[0] if lo is None else max(lo, got[0])
                hi = got[1] if hi is None else min(hi, got[1])
            elif qi == 0 and li > 0:
                cand = _floor(rhs / li)
                hi = cand if hi is None else min(hi, cand)
            elif qi == 0 and li < 0:
                cand = _ceil(rhs / li)
                lo = cand if lo is None else max(lo, cand)
            elif qi == 0 and li == 0 and rhs < 0:
                return "empty"
        return (lo, hi)

    for _ in range(3 * r + 6):
        progress = False
        for i in range(r):
            got = bound_var(i)
            if got == "empty":
                return [(0, -1)] * r
            new = _merge_interval(intervals[i], got)
            if new != intervals[i]:
                intervals[i] = new
                progress = True
        if all(
            iv is not None and iv[0] is not None and iv[1] is not None
            for iv in intervals
        ):
            return [(iv[0], iv[1]) for iv in intervals]
        if not progress:
            break
    raise UnboundedWindow(
        "window does not bound every momentum direction; add a charge bound"
    )


def _merge_interval(old, new):
    if new is None:
        return old
    nlo, nhi = new
    if old is None:
        return (nlo, nhi)
    olo, ohi = old
    lo = olo if nlo is None else (nlo if olo is None else max(olo, nlo))
    hi = ohi if nhi is None else (nhi if ohi is None else min(ohi, nhi))
    return (lo, hi)


def _iter_box(box):
    def rec(i, acc):
        if i == len(box):
            yield tuple(acc)
            return
        lo, hi = box[i]
        for n in range(lo, hi + 1):
            yield from rec(i + 1, acc + [n])

    yield from rec(0, [])
