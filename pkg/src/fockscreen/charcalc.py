"""Formal graded series in q (rational exponents), z and u (integers).

The character type: finitely many terms below a q-cap, integer
coefficients, exact rational q-exponents.  These series are the
independent counting oracle set against kernel towers.
"""

from __future__ import annotations

from fractions import Fraction

from .fockspace import FockModuleSpec, Window, _colored_partition_counts

Q = Fraction


class GradedSeries:
    """sum c_{q,z,u} q^q z^z u^u truncated at q <= qmax."""

    __slots__ = ("qmax", "terms")

    def __init__(self, qmax, terms=None):
        self.qmax = Q(qmax)
        self.terms = {}
        for key, c in (terms or {}).items():
            qe, ze, ue = key
            qe = Q(qe)
            if c and qe <= self.qmax:
                k = (qe, int(ze), int(ue))
                self.terms[k] = self.terms.get(k, 0) + int(c)
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def one(cls, qmax):
        return cls(qmax, {(0, 0, 0): 1})

    @classmethod
    def monomial(cls, qmax, qexp, zexp=0, uexp=0, coeff=1):
        return cls(qmax, {(qexp, zexp, uexp): coeff})

    def coeff(self, qexp, zexp=0, uexp=0) -> int:
        return self.terms.get((Q(qexp), zexp, uexp), 0)

    def __add__(self, other):
        qmax = min(self.qmax, other.qmax)
        out = dict(GradedSeries(qmax, self.terms).terms)
        for k, v in GradedSeries(qmax, other.terms).terms.items():
            out[k] = out.get(k, 0) + v
        return GradedSeries(qmax, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, int):
            return GradedSeries(self.qmax, {k: other * v for k, v in self.terms.items()})
        qmax = min(self.qmax, other.qmax)
        out = {}
        bterms = sorted(other.terms.items())
        for (q1, z1, u1), c1 in self.terms.items():
            for (q2, z2, u2), c2 in bterms:
                q = q1 + q2
                if q > qmax:
                    continue
                k = (q, z1 + z2, u1 + u2)
                out[k] = out.get(k, 0) + c1 * c2
        return GradedSeries(qmax, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        qmax = min(self.qmax, other.qmax)
        return GradedSeries(qmax, self.terms).terms == GradedSeries(qmax, other.terms).terms

    def __hash__(self):
        raise TypeError("GradedSeries is not hashable")

    def q_projection(self) -> "GradedSeries":
        out = {}
        for (qe, _, _), c in self.terms.items():
            k = (qe, 0, 0)
            out[k] = out.get(k, 0) + c
        return GradedSeries(self.qmax, out)

    def nonnegative(self) -> bool:
        return all(c >= 0 for c in self.terms.values())

    def lowest_terms(self):
        """Terms of minimal q-exponent, sorted."""
        if not self.terms:
            return []
        qmin = min(q for q, _, _ in self.terms)
        return sorted((k, v) for k, v in self.terms.items() if k[0] == qmin)

    def to_json_obj(self):
        return [
            [k[0].numerator, k[0].denominator, k[1], k[2], v]
            for k, v in sorted(self.terms.items())
        ]

    def __repr__(self):
        bits = []
        for (qe, ze, ue), c in sorted(self.terms.items())[:12]:
            s = f"{c}*q^{qe}"
            if ze:
                s += f"z^{ze}"
            if ue:
                s += f"u^{ue}"
            bits.append(s)
        if len(self.terms) > 12:
            bits.append("...")
        return "Series(" + " + ".join(bits) + f" | q<={self.qmax})"


def compare(a: GradedSeries, b: GradedSeries, limit=10):
    """First `limit` mismatching terms on the common window; [] iff equal."""
    qmax = min(a.qmax, b.qmax)
    at = GradedSeries(qmax, a.terms).terms
    bt = GradedSeries(qmax, b.terms).terms
    diffs = []
    for k in sorted(set(at) | set(bt)):
        la, lb = at.get(k, 0), bt.get(k, 0)
        if la != lb:
            diffs.append((k, la, lb))
            if len(diffs) >= limit:
                break
    return diffs


def eta_inv(qmax, rank=1) -> GradedSeries:
    """prod_{n>=1} (1 - q^n)^{-rank}, truncated."""
    n_max = int(Q(qmax))
    counts = _colored_partition_counts(max(n_max, 0), rank)
    return GradedSeries(qmax, {(n, 0, 0): counts[n] for n in range(n_max + 1)})


def virasoro_character(p: int, n: int, qmax) -> GradedSeries:
    """Irreducible character q^{h_{1,n}} (1 - q^n) / prod(1 - q^i).

    The (1,p) irreducible with weight h_{1,n}; cross-checked against the
    Shapovalov-rank oracle in the test suite.
    """
    h = Q((1 - n * p) ** 2 - (p - 1) ** 2, 4 * p)
    qmax = Q(qmax)
    head = GradedSeries(qmax - h, {(0, 0, 0): 1, (n, 0, 0): -1})
    prod = head * eta_inv(qmax - h)
    return GradedSeries(qmax, {(h + qe, ze, ue): c for (qe, ze, ue), c in prod.terms.items()})


def sl2_character(n: int, axis: str = "z") -> GradedSeries:
    """Character of the (n+1)-dimensional representation: sum z^{n-2j}."""
    terms = {}
    for j in range(n + 1):
        e = n - 2 * j
        key = (0, e, 0) if axis == "z" else (0, 0, e)
        terms[key] = 1
    return GradedSeries(Q(10 ** 9), terms)


def fock_character(spec: FockModuleSpec, win: Window, zname=None, uname=None) -> GradedSeries:
    """sum over momenta of q^wt z^charge u^charge / (1-q)^rank, truncated."""
    qmax = win.max_weight
    rank = len(spec.active_indices())
    out = {}
    zvec = spec.charge_vector(zname) if zname else None
    uvec = spec.charge_vector(uname) if uname else None
    for lam in spec.enumerate_momenta(win):
        w0 = spec.conformal.momentum_weight(lam)
        ze = int(zvec.pair(lam)) if zvec is not None else 0
        ue = int(uvec.pair(lam)) if uvec is not None else 0
        budget = int(qmax - w0)
        counts = _colored_partition_counts(budget, rank)
        for nn in range(budget + 1):
            k = (w0 + nn, ze, ue)
            out[k] = out.get(k, 0) + counts[nn]
    return GradedSeries(qmax, out)


def geometric_inv(qmax, qstep, zexp=0, uexp=0) -> GradedSeries:
    """(1 - q^qstep z^zexp u^uexp)^{-1} truncated; needs qstep > 0."""
    qstep = Q(qstep)
    assert qstep > 0
    out = {}
    j = 0
    while j * qstep <= Q(qmax):
        out[(j * qstep, j * zexp, j * uexp)] = 1
        j += 1
    return GradedSeries(qmax, out)


def weyl_pair_character(qmax, zexp, uexp) -> GradedSeries:
    """Character of one symmetric-weight Weyl pair.

    Two fields of weight 1/2 with opposite (z, u) charges; modes at
    weights 1/2, 3/2, 5/2, ...
    """
    out = GradedSeries.one(qmax)
    n = 0
    while Q(2 * n + 1, 2) <= Q(qmax):
        w = Q(2 * n + 1, 2)
        out = out * geometric_inv(qmax, w, zexp, uexp)
        out = out * geometric_inv(qmax, w, -zexp, -uexp)
        n += 1
    return out


def series_from_dims(dims: dict, qmax, names, zname=None, uname=None) -> GradedSeries:
    """Build a series from a {(weight, charges): dim} table.

    `names` is the charge-name tuple matching the charges entries.
    """
    zix = names.index(zname) if zname else None
    uix = names.index(uname) if uname else None
    out = {}
    for (w, ch), d in dims.items():
        if w > Q(qmax):
            continue
        ze = int(ch[zix]) if zix is not None else 0
        ue = int(ch[uix]) if uix is not None else 0
        k = (w, ze, ue)
        out[k] = out.get(k, 0) + d
    return GradedSeries(qmax, out)
