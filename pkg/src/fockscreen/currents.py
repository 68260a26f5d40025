"""The affine current families, Sugawara recovery, singular vectors.

Three realizations of the same level k = -2 + 1/p current algebra are
assembled as dressed vectors: directly on the rank-three lattice, from
the Weyl pair by normally-ordered words, and through the half-lattice
(Virasoro times hyperbolic) embedding.  All three must pass the same
brute-force commutation checks; the Sugawara vector recovered from any
of them must be of free-field form and reproduce the model's grading.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import StabilityError
from .fockspace import Window
from .linalg import nullspace_columns
from .model import Model
from .vertexops import (
    DressedVector,
    ModeOperator,
    Tower,
    apply_word,
    commutator_apply,
    vacuum,
)

Q = Fraction

REALIZATIONS = ("lattice", "weyl_fock", "vir_pi")


class CurrentFamily:
    """Mode operators of one realization of the current algebra."""

    def __init__(self, model: Model, realization: str, osc=None):
        if realization not in REALIZATIONS:
            raise ValueError(f"unknown realization {realization!r}")
        self.model = model
        self.realization = realization
        self.osc = tuple(osc) if osc else model.osc_core
        self.states = self._build_states()
        self._modes = {}

    def _build_states(self):
        m = self.model
        if self.realization == "lattice":
            return {"e": m.e_dv, "h": m.h_dv, "f": m.f_dv}
        if self.realization == "vir_pi":
            return {"e": m.e_pi_dv, "h": m.h_pi_dv, "f": m.f_pi_dv}
        # weyl_fock: normally ordered words in the Weyl pair and delta
        osc = self.osc
        delta1 = DressedVector.monomial(1, ((m.delta, 1),), m.zero)
        e = m.a_dv
        h = -2 * apply_word([(m.astar_dv, -1)], m.a_dv, m.cocycle, osc) + delta1
        f = (
            -1 * apply_word([(m.astar_dv, -1), (m.astar_dv, -1)], m.a_dv, m.cocycle, osc)
            + m.k * m.astar_dv.derivative()
            + apply_word([(m.astar_dv, -1)], delta1, m.cocycle, osc)
        )
        return {"e": e, "h": h, "f": f}

    def mode(self, name: str, n: int) -> ModeOperator:
        key = (name, n)
        got = self._modes.get(key)
        if got is None:
            got = self.model.mode(self.states[name], n, self.osc, f"{name}({n})")
            self._modes[key] = got
        return got

    def level_readout(self) -> Fraction:
        """k from [h(1), h(-1)] applied to the vacuum."""
        img = commutator_apply(
            self.mode("h", 1), self.mode("h", -1), vacuum(self.model.space).expand_states(self.osc).popitem()[0]
        )
        if not img:
            return Q(0)
        (state, coeff), = img.items()
        return coeff / 2


_RELATIONS = ("he", "hf", "ef", "hh", "ee", "ff")


def check_affine_relations(fam: CurrentFamily, tower: Tower, mode_range=2) -> dict:
    """Exact matrix identities of the current algebra on a tower.

    Checks, for |m|,|n| <= mode_range, on every state of the tower:
      [h(m), e(n)] = 2 e(m+n)          [h(m), f(n)] = -2 f(m+n)
      [e(m), f(n)] = h(m+n) + m k d    [h(m), h(n)] = 2 k m d
      [e(m), e(n)] = 0                 [f(m), f(n)] = 0
    with d the Kronecker delta at m+n = 0.
    """
    model = fam.model
    k = model.k
    results = []
    states = tower.states
    rng = range(-mode_range, mode_range + 1)

    def commut(a, b, st):
        return commutator_apply(a, b, st)

    def sub(target: dict, op: ModeOperator, st, scale):
        for k2, v in op.apply_state(st).items():
            target[k2] = target.get(k2, Q(0)) - scale * v

    for mm in rng:
        for nn in rng:
            checks = {
                "he": lambda st: _minus(
                    commut(fam.mode("h", mm), fam.mode("e", nn), st),
                    fam.mode("e", mm + nn), st, 2),
                "hf": lambda st: _minus(
                    commut(fam.mode("h", mm), fam.mode("f", nn), st),
                    fam.mode("f", mm + nn), st, -2),
                "ef": lambda st: _ef_check(fam, mm, nn, k, st),
                "hh": lambda st: _hh_check(fam, mm, nn, k, st),
                "ee": lambda st: commut(fam.mode("e", mm), fam.mode("e", nn), st),
                "ff": lambda st: commut(fam.mode("f", mm), fam.mode("f", nn), st),
            }
            for rel, fn in checks.items():
                bad = 0
                for st in states:
                    if fn(st):
                        bad += 1
                results.append(
                    {
                        "relation": rel,
                        "m": mm,
                        "n": nn,
                        "states": len(states),
                        "failures": bad,
                        "status": "pass" if bad == 0 else "fail",
                    }
                )
    level = fam.level_readout()
    return {
        "realization": fam.realization,
        "level": str(level),
        "level_ok": level == k,
        "results": results,
        "ok": level == k and all(r["status"] == "pass" for r in results),
    }


def _minus(got: dict, op: ModeOperator, st, scale):
    for k2, v in op.apply_state(st).items():
        got[k2] = got.get(k2, Q(0)) - scale * v
    return {a: b for a, b in got.items() if b}


def _ef_check(fam, mm, nn, k, st):
    got = commutator_apply(fam.mode("e", mm), fam.mode("f", nn), st)
    got = _minus(got, fam.mode("h", mm + nn), st, 1)
    if mm + nn == 0 and mm:
        got[st] = got.get(st, Q(0)) - mm * k
    return {a: b for a, b in got.items() if b}


def _hh_check(fam, mm, nn, k, st):
    got = commutator_apply(fam.mode("h", mm), fam.mode("h", nn), st)
    if mm + nn == 0 and mm:
        got[st] = got.get(st, Q(0)) - 2 * k * mm
    return {a: b for a, b in got.items() if b}


def sugawara_state(fam: CurrentFamily):
    """The Sugawara vector computed from the currents.

    Returns (state, conformal_spec).  Fails loudly unless the state is
    of free-field form: zero momentum, depth <= 2, quadratic part equal
    to half the inverse pairing on the boson block.
    """
    m = fam.model
    osc = fam.osc
    coc = m.cocycle
    e, h, f = fam.states["e"], fam.states["h"], fam.states["f"]
    s1 = apply_word([(e, -1)], f, coc, osc)
    s2 = apply_word([(f, -1)], e, coc, osc)
    s3 = apply_word([(h, -1)], h, coc, osc)
    omega = Q(1, 1) / (2 * (m.k + 2)) * (s1 + s2 + Q(1, 2) * s3)

    shift = m.zero
    quad = {}
    for coeff, exc, mom in omega.terms:
        if not mom.is_zero():
            raise StabilityError("sugawara state has momentum terms")
        depths = sorted(n for _, n in exc)
        if depths == [2]:
            shift = shift + coeff * exc[0][0]
        elif depths == [1, 1]:
            i = m.space.basis_names.index(_basis_name(exc[0][0]))
            j = m.space.basis_names.index(_basis_name(exc[1][0]))
            key = (min(i, j), max(i, j))
            quad[key] = quad.get(key, Q(0)) + coeff
        else:
            raise StabilityError(f"sugawara state has a depth pattern {depths}")
    expected = _inverse_gram_quad(m)
    if quad != expected:
        raise StabilityError("sugawara quadratic part is not the inverse pairing")

    from .fockspace import ConformalSpec

    return omega, ConformalSpec(m.space, shift)


def _basis_name(vec):
    names = [n for n, c in zip(vec.space.basis_names, vec.coords) if c]
    if len(names) != 1:
        raise StabilityError("canonical form should be basis-aligned")
    return names[0]


def _inverse_gram_quad(m: Model):
    # boson block of the model space is diagonal
    out = {}
    for i, name in enumerate(m.space.basis_names):
        g = m.space.gram[i][i]
        if name in ("alpha", "beta", "delta") and g:
            out[(i, i)] = 1 / (2 * g)
    return out


def find_singular_vectors(fam: CurrentFamily, module, dominant_only=True):
    """Joint kernel of raising modes on a kernel tower or plain tower.

    A singular line is annihilated by e(n), h(n), f(n) for n >= 1 and by
    e(0), within a graded piece of the module.  With `dominant_only`,
    only pieces whose affine charge is a nonnegative integer are
    searched (the rest are reported separately by the caller if needed).
    Exactness needs no window bookkeeping: raising modes are computed in
    full at the state level, and only finitely many act nonzero.
    """
    from .screenings import KernelTower

    kt = module if isinstance(module, KernelTower) else None
    spec = kt.spec
    names = kt.charge_names()
    hix = names.index("h")
    out = []
    for key in sorted(kt.piece_basis):
        weight, charges = key
        hch = charges[hix]
        if dominant_only and (hch.denominator != 1 or hch < 0):
            continue
        cols = kt.piece_columns(key)
        if not cols:
            continue
        nmax = _raising_bound(fam, cols)
        ops = [fam.mode("e", 0)]
        for n in range(1, nmax + 1):
            for x in ("e", "h", "f"):
                ops.append(fam.mode(x, n))
        stacked = []
        for col in cols:
            big = {}
            for oi, op in enumerate(ops):
                for k2, v in op.apply_sum(col).items():
                    big[(oi, k2)] = v
            stacked.append(big)
        null = nullspace_columns(stacked)
        for vec in null:
            state = {}
            for x, col in zip(vec, cols):
                for st, c in col.items():
                    state[st] = state.get(st, Q(0)) + x * c
            out.append(
                {
                    "weight": weight,
                    "h_charge": hch,
                    "piece": key,
                    "vector": {st: c for st, c in state.items() if c},
                }
            )
    return out


def _raising_bound(fam: CurrentFamily, cols) -> int:
    """Safe cap on raising-mode indices that can act nonzero."""
    most = 0
    for name in ("e", "h", "f"):
        dv = fam.states[name]
        for col in cols:
            for st in col:
                depth = sum(n for _, n in st.exc)
                mu = fam.model.space.vector(st.momentum)
                for _, exc, lam in dv.terms:
                    pair = lam.pair(mu)
                    dress = sum(n for _, n in exc)
                    bound = -pair + depth + dress + len(exc) * depth + 1
                    most = max(most, int(bound) + 1)
    return most
