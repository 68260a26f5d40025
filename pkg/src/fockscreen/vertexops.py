"""Exact matrices of vertex-operator modes between windowed Fock bases.

The engine evaluates Y(A e^lam, z) u for a dressed vector A e^lam and a
basis state u by Wick expansion at one fixed power of z:

    Y(h_1(-n_1)...h_r(-n_r) e^lam, z)
        = : (d^(n_1-1) h_1(z) / (n_1-1)!) ... Gamma_lam(z) :
    Gamma_lam(z) = E-(lam,z) e_lam z^{lam(0)} E+(lam,z)

with zero modes acting on the source momentum.  Every coefficient
extraction is a finite exact sum, so computed blocks carry no truncation
error; validity windows only record which source states were processed.

Mode bookkeeping: the coefficient of z^t in Y(v,z) shifts conformal
weight by wt(v) + t.  Operators are indexed either by a fixed z-power
(`zpow`), by the weight they lower (`wshift`, the project's authoritative
label), or as sector residues (`res`: the z^{-1+frac} coefficient, where
frac is the fractional part of the momentum pairing on each sector).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatch,
    NonIntegralPairing,
    NotInSpan,
    StabilityError,
    WindowTooSmall,
)
from .fockspace import BasisState, ConformalSpec, FockModuleSpec, Window
from .linalg import nullspace_columns, solve_in_span
from .qlattice import LatticeVector, QuadSpace, SignCocycle, change_basis, koszul_sign

Q = Fraction


def _gen_binom(x: int, k: int) -> Fraction:
    out = Q(1)
    for t in range(k):
        out *= Q(x - t, t + 1)
    return out


def _dress_coeff(n: int, m: int) -> Fraction:
    """Coefficient of h(m) z^{-m-n} in d^(n-1) h(z) / (n-1)!."""
    sign = -1 if (n - 1) % 2 else 1
    return sign * _gen_binom(m + n - 1, n - 1)


class DressedVector:
    """Finite rational combination of (Heisenberg monomial) e^momentum.

    Terms are tuples (coeff, exc, momentum) with exc a tuple of
    (LatticeVector direction, depth >= 1) pairs.  Terms are merged on a
    canonical key so equality is structural.
    """

    __slots__ = ("space", "terms")

    def __init__(self, space: QuadSpace, terms: Iterable):
        # canonical form: excitation directions resolved over the
        # primary basis, so structural equality is true equality
        self.space = space
        basis = [space.basis_vector(n) for n in space.basis_names]
        merged = {}
        for coeff, exc, mom in terms:
            for st, c in _normalize_monomial(Q(coeff), exc, mom, basis).items():
                merged[st] = merged.get(st, Q(0)) + c
        out = []
        for st in sorted(merged):
            c = merged[st]
            if c:
                exc = tuple((basis[i], n) for i, n in st.exc)
                out.append((c, exc, LatticeVector(space, st.momentum)))
        self.terms = tuple(out)

    @classmethod
    def momentum(cls, lam: LatticeVector, coeff=1) -> "DressedVector":
        return cls(lam.space, [(Q(coeff), (), lam)])

    @classmethod
    def monomial(cls, coeff, exc, lam: LatticeVector) -> "DressedVector":
        return cls(lam.space, [(Q(coeff), tuple(exc), lam)])

    def __add__(self, other: "DressedVector") -> "DressedVector":
        return DressedVector(self.space, self.terms + other.terms)

    def __sub__(self, other: "DressedVector") -> "DressedVector":
        return self + (-1) * other

    def __mul__(self, scalar) -> "DressedVector":
        s = Q(scalar)
        return DressedVector(
            self.space, [(s * c, e, m) for c, e, m in self.terms]
        )

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, DressedVector):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("DressedVector is not hashable")

    def momenta(self) -> list:
        seen = []
        for _, _, m in self.terms:
            if m not in seen:
                seen.append(m)
        return seen

    def weight(self, conformal: ConformalSpec) -> Fraction:
        """Conformal weight; raises if the vector is not homogeneous."""
        wts = {
            conformal.momentum_weight(m) + sum(n for _, n in e)
            for _, e, m in self.terms
        }
        if len(wts) != 1:
            raise ValueError(f"not weight-homogeneous: weights {sorted(wts)}")
        return wts.pop()

    def term_weight(self, conformal: ConformalSpec, term) -> Fraction:
        _, exc, mom = term
        return conformal.momentum_weight(mom) + sum(n for _, n in exc)

    def derivative(self) -> "DressedVector":
        """Translation operator: d/dz at the state level."""
        out = []
        for coeff, exc, mom in self.terms:
            for i, (v, n) in enumerate(exc):
                new = list(exc)
                new[i] = (v, n + 1)
                out.append((coeff * n, tuple(new), mom))
            if not mom.is_zero():
                out.append((coeff, exc + ((mom, 1),), mom))
        return DressedVector(self.space, out)

    def expand_states(self, osc: Sequence[LatticeVector]) -> dict:
        """Resolve excitation directions over `osc`: {BasisState: coeff}."""
        out: dict = {}
        for coeff, exc, mom in self.terms:
            for st, c in _normalize_monomial(coeff, exc, mom, osc).items():
                out[st] = out.get(st, Q(0)) + c
        return {k: v for k, v in out.items() if v}

    @classmethod
    def from_states(cls, space, states: dict, osc) -> "DressedVector":
        terms = []
        for st, coeff in states.items():
            exc = tuple((osc[i], n) for i, n in st.exc)
            terms.append((coeff, exc, LatticeVector(space, st.momentum)))
        return cls(space, terms)

    def __repr__(self):
        if not self.terms:
            return "DressedVector(0)"
        bits = []
        for coeff, exc, mom in self.terms[:6]:
            excs = "".join(f"{v!r}(-{n})" for v, n in exc)
            bits.append(f"{coeff}*{excs}e^{mom!r}")
        more = "" if len(self.terms) <= 6 else f" (+{len(self.terms) - 6})"
        return "DressedVector(" + " + ".join(bits) + more + ")"


def _normalize_monomial(coeff, exc, mom, osc):
    """Expand arbitrary excitation directions over the oscillator basis."""
    acc = {(): coeff}
    for v, n in exc:
        try:
            comps = change_basis(v, osc)
        except NotInSpan:
            raise NotInSpan(
                f"excitation direction {v!r} outside oscillator span"
            ) from None
        nxt = {}
        for key, c in acc.items():
            for i, comp in enumerate(comps):
                if comp:
                    k2 = tuple(sorted(key + ((i, n),)))
                    nxt[k2] = nxt.get(k2, Q(0)) + c * comp
        acc = nxt
        if not acc:
            break
    out = {}
    for key, c in acc.items():
        if c:
            st = BasisState(mom.coords, key)
            out[st] = out.get(st, Q(0)) + c
    return out


class ModeOperator:
    """One extracted mode of Y(v, z), acting exactly on basis states.

    `extraction` is ('zpow', t), ('wshift', m, conformal) or ('res',).
    Output states are expressed over `osc`; input excitation directions
    are read off the same list, so source and target towers must share
    their oscillator basis (all towers of one model do).
    """

    def __init__(self, dv: DressedVector, cocycle: SignCocycle, osc, extraction,
                 name: str = ""):
        self.dv = dv
        self.cocycle = cocycle
        self.osc = tuple(osc)
        self.extraction = extraction
        self.name = name or "op"
        self._cache: dict = {}
        self.space = dv.space

    # -- public API -----------------------------------------------------------

    def apply_state(self, state: BasisState) -> dict:
        got = self._cache.get(state)
        if got is None:
            got = self._apply_uncached(state)
            self._cache[state] = got
        return got

    def apply_sum(self, states: dict) -> dict:
        out: dict = {}
        for st, c in states.items():
            for k, v in self.apply_state(st).items():
                out[k] = out.get(k, Q(0)) + c * v
        return {k: v for k, v in out.items() if v}

    def apply_dressed(self, dv: DressedVector) -> DressedVector:
        states = dv.expand_states(self.osc)
        return DressedVector.from_states(self.space, self.apply_sum(states), self.osc)

    def momentum_shift(self) -> LatticeVector | None:
        moms = self.dv.momenta()
        return moms[0] if len(moms) == 1 else None

    def weight_shift(self, conformal: ConformalSpec):
        """Weight shift of the operator, when uniform across terms/sectors."""
        kind = self.extraction[0]
        if kind == "wshift":
            return -self.extraction[1]
        shifts = set()
        for term in self.dv.terms:
            d = self.dv.term_weight(conformal, term)
            if kind == "zpow":
                shifts.add(d + self.extraction[1])
            else:  # sector residue; integral sectors only
                shifts.add(d - 1)
        return shifts.pop() if len(shifts) == 1 else None

    # -- expansion core ---------------------------------------------------------

    def _term_zpow(self, term, mu: LatticeVector):
        kind = self.extraction[0]
        if kind == "zpow":
            return self.extraction[1]
        if kind == "wshift":
            _, m, conformal = self.extraction
            return -m - self.dv.term_weight(conformal, term)
        return Q(-1)  # residue

    def integral_on(self, mu: LatticeVector) -> bool:
        """Whether every term pairs integrally with the sector momentum.

        On sectors where this fails the operator has no single-valued
        mode at the requested power; kernel constructions treat such
        sectors as carrying no invariant vectors.
        """
        return all(lam.pair(mu).denominator == 1 for _, _, lam in self.dv.terms)

    def _apply_uncached(self, state: BasisState) -> dict:
        space = self.space
        mu = LatticeVector(space, state.momentum)
        slots = [(self.osc[i], n) for i, n in state.exc]
        out: dict = {}
        for term in self.dv.terms:
            coeff, dress, lam = term
            t = self._term_zpow(term, mu)
            kk = t - lam.pair(mu)
            if kk.denominator != 1:
                raise NonIntegralPairing(
                    f"{self.name}: z-power {t} unreachable on sector "
                    f"<{lam!r},{mu!r}> = {lam.pair(mu)}"
                )
            eps = self.cocycle.value(lam, mu) if not lam.is_zero() else 1
            for res_coeff, survivors, created in self._wick(
                coeff * eps, dress, lam, mu, slots, int(kk)
            ):
                mono = _normalize_monomial(
                    res_coeff, tuple(survivors) + tuple(created), mu + lam, self.osc
                )
                for st, c in mono.items():
                    out[st] = out.get(st, Q(0)) + c
        return {k: v for k, v in out.items() if v}

    def _wick(self, coeff0, dress, lam, mu, slots, K: int):
        """All Wick patterns of the normal-ordered product at z-power K
        relative to z^{<lam,mu>}.  Yields (coeff, surviving, created)."""
        results = []
        nslots = len(slots)
        total_depth = sum(d for _, d in slots)
        lam_zero = lam.is_zero()

        def fields(fi, mask, zcum, factor, created):
            if fi == len(dress):
                eplus(0, mask, zcum, factor, created)
                return
            hvec, n_i = dress[fi]
            # zero mode on the source momentum
            zm = hvec.pair(mu)
            if zm:
                fields(fi + 1, mask, zcum - n_i, factor * _dress_coeff(n_i, 0) * zm,
                       created)
            # contract one source excitation
            for si in range(nslots):
                if mask >> si & 1:
                    continue
                svec, sdep = slots[si]
                p = hvec.pair(svec)
                if not p:
                    continue
                cc = _dress_coeff(n_i, sdep) * sdep * p
                if cc:
                    fields(fi + 1, mask | (1 << si), zcum - sdep - n_i,
                           factor * cc, created)
            # become a creator h(-e), z-power e - n_i
            rest_min = -sum(nj for _, nj in dress[fi + 1:]) - total_depth
            e_max = K - zcum + n_i - rest_min
            for e in range(1, e_max + 1):
                cc = _dress_coeff(n_i, -e)
                if cc:
                    fields(fi + 1, mask, zcum + e - n_i, factor * cc,
                           created + [(hvec, e)])

        def eplus(si, mask, zcum, factor, created):
            if si == nslots:
                # E- creations must supply the remaining z-power
                D = K - zcum
                if D < 0:
                    return
                if D == 0:
                    results.append(
                        (coeff0 * factor,
                         [slots[i] for i in range(nslots) if not mask >> i & 1],
                         created)
                    )
                    return
                if lam_zero:
                    return
                for part, pcoef in _partitions_with_coeff(D):
                    results.append(
                        (coeff0 * factor * pcoef,
                         [slots[i] for i in range(nslots) if not mask >> i & 1],
                         created + [(lam, j) for j in part])
                    )
                return
            if mask >> si & 1:
                eplus(si + 1, mask, zcum, factor, created)
                return
            # leave slot si alone
            eplus(si + 1, mask, zcum, factor, created)
            if lam_zero:
                return
            svec, sdep = slots[si]
            p = lam.pair(svec)
            if p:
                eplus(si + 1, mask | (1 << si), zcum - sdep, factor * (-p), created)

        fields(0, 0, 0, Q(1), [])
        return results


def _partitions_with_coeff(n: int, _cache={}):
    """Partitions of n with E- exponential coefficients prod 1/(j^k k!)."""
    if n in _cache:
        return _cache[n]
    out = []

    def rec(remaining, max_part, acc):
        if remaining == 0:
            coeff = Q(1)
            i = 0
            while i < len(acc):
                j = acc[i]
                k = acc.count(j)
                coeff /= Q(j) ** k * _fact(k)
                i += k
            out.append((tuple(acc), coeff))
            return
        for j in range(min(max_part, remaining), 0, -1):
            rec(remaining - j, j, acc + [j])

    rec(n, n, [])
    _cache[n] = out
    return out


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# -- towers: materialized windowed bases ---------------------------------------


class Tower:
    """A FockModuleSpec with an enumerated window: the working basis."""

    def __init__(self, spec: FockModuleSpec, window: Window):
        self.spec = spec
        self.window = window
        self.states = spec.enumerate_basis(window)
        self.index = {st: i for i, st in enumerate(self.states)}
        self.pieces: dict = {}
        for i, st in enumerate(self.states):
            key = (spec.weight_of(st), spec.charges_of(st))
            self.pieces.setdefault(key, []).append(i)

    def piece_keys(self):
        return sorted(self.pieces.keys())

    def piece_states(self, key):
        return [self.states[i] for i in self.pieces[key]]

    def __len__(self):
        return len(self.states)


def operator_columns(op: ModeOperator, states: Sequence[BasisState]):
    """Images of `states` as sparse columns keyed by target BasisState."""
    return [op.apply_state(st) for st in states]


def stacked_columns(ops: Sequence[ModeOperator], states: Sequence[BasisState]):
    """Columns of several operators stacked with disjoint row tags."""
    cols = []
    for st in states:
        col = {}
        for oi, op in enumerate(ops):
            for k, v in op.apply_state(st).items():
                col[(oi, k)] = v
        cols.append(col)
    return cols


def commutator_apply(a: ModeOperator, b: ModeOperator, state: BasisState) -> dict:
    """[a, b] state image with the Koszul sign of the momentum sectors.

    Bracket convention: a b - sigma b a with sigma = (-1)^{p(a) p(b)} read
    off the integral norms of the (single) momenta of a and b.
    """
    ua, ub = a.momentum_shift(), b.momentum_shift()
    if ua is None or ub is None:
        raise ValueError("commutator needs single-momentum operators")
    sigma = koszul_sign(ua, ub)
    out = a.apply_sum(b.apply_state(state))
    for k, v in b.apply_sum(a.apply_state(state)).items():
        out[k] = out.get(k, Q(0)) - sigma * v
    return {k: v for k, v in out.items() if v}


def apply_word(word, start: DressedVector, cocycle: SignCocycle, osc,
               max_terms: int = 200_000) -> DressedVector:
    """Apply a sequence of (DressedVector, paper mode n) to a state.

    Modes follow Y(x,z) = sum x(n) z^{-n-1}; the word is applied right to
    left, so word = [(e, -1)] on the vacuum yields the state e.
    """
    current = start
    for dv, n in reversed(word):
        op = ModeOperator(dv, cocycle, osc, ("zpow", Q(-n - 1)))
        current = op.apply_dressed(current)
        if len(current.terms) > max_terms:
            raise WindowTooSmall("apply_word blew past the term cap")
    return current


def vacuum(space: QuadSpace) -> DressedVector:
    return DressedVector.momentum(space.zero())


# -- graded operator wrapper ----------------------------------------------------


class GradedOperator:
    """Blocks of a mode operator over the graded pieces of a source tower.

    Blocks are exact: each image is computed in full at the state level,
    so enlarging the window never changes a block already computed (the
    valid window is simply the source window).
    """

    def __init__(self, op: ModeOperator, tower: Tower, name: str = ""):
        self.op = op
        self.tower = tower
        self.name = name or op.name
        self._blocks: dict = {}

    @property
    def valid_window(self) -> Window:
        return self.tower.window

    def weight_shift(self):
        return self.op.weight_shift(self.tower.spec.conformal)

    def momentum_shift(self):
        return self.op.momentum_shift()

    def block(self, piece_key):
        got = self._blocks.get(piece_key)
        if got is None:
            states = self.tower.piece_states(piece_key)
            got = (states, operator_columns(self.op, states))
            self._blocks[piece_key] = got
        return got

    def all_columns(self):
        return operator_columns(self.op, self.tower.states)

    def export_triplets(self):
        """Sparse triplet list (piece id, row key index, col, num, den)."""
        out = []
        for pid, key in enumerate(self.tower.piece_keys()):
            states, cols = self.block(key)
            rows = sorted({k for col in cols for k in col})
            rix = {k: i for i, k in enumerate(rows)}
            for j, col in enumerate(cols):
                for k, v in sorted(col.items()):
                    out.append((pid, rix[k], j, v.numerator, v.denominator))
        return out


def restrict_to_subspace(op: ModeOperator, basis_states: Sequence[BasisState],
                         sub_columns, target_columns, what: str = "operator"):
    """Matrix of `op` in subspace coordinates.

    `sub_columns`: the subspace basis as state-dict columns (source side).
    `target_columns`: the target subspace basis columns.  Raises
    StabilityError when an image leaves the target span.
    """
    out_cols = []
    for col in sub_columns:
        img = op.apply_sum(col)
        coords = solve_in_span(target_columns, img)
        if coords is None:
            raise StabilityError(f"{what}: image leaves the subspace span")
        out_cols.append(coords)
    return out_cols
