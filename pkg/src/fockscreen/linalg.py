"""Exact rational linear algebra on sparse columns.

Matrices appear as lists of columns, each column a dict mapping an
arbitrary (orderable, hashable) row key to a nonzero Fraction.  This
fits how vertex operators are computed: the image of each basis state
is a sparse combination of target states.  Everything is exact; no
floats anywhere.

The workhorse is a one-pass sparse column reduction that tracks the
combination producing each reduced column, so rank, nullspace and
linear solves all come from the same elimination.
"""

from __future__ import annotations

from fractions import Fraction

Q = Fraction


class _Reducer:
    """Incremental sparse Gaussian elimination over the rationals."""

    def __init__(self):
        self.pivots = {}  # rowkey -> (reduced column dict, combo dict)
        self.rank = 0

    def feed(self, col: dict, tag):
        """Reduce `col` against current pivots.

        Returns None if the column added a new pivot, else the combo
        dict expressing the dependency (tag -> coefficient, where the
        coefficient of `tag` itself is 1).
        """
        cur = dict(col)
        combo = {tag: Q(1)}
        while cur:
            r = min(cur)
            piv = self.pivots.get(r)
            if piv is None:
                self.pivots[r] = (cur, combo)
                self.rank += 1
                return None
            pc, pcombo = piv
            f = cur[r] / pc[r]
            for k, v in pc.items():
                nv = cur.get(k, Q(0)) - f * v
                if nv:
                    cur[k] = nv
                elif k in cur:
                    del cur[k]
            for k, v in pcombo.items():
                nv = combo.get(k, Q(0)) - f * v
                if nv:
                    combo[k] = nv
                elif k in combo:
                    del combo[k]
        return combo


def rank_columns(columns) -> int:
    red = _Reducer()
    for j, col in enumerate(columns):
        if col:
            red.feed(col, j)
    return red.rank


def nullspace_columns(columns):
    """Canonical basis of {x : sum_j x_j col_j = 0}.

    Returns coefficient vectors (lists of Fractions, one per column) in
    reduced echelon form, so output is deterministic and reproducible.
    """
    n = len(columns)
    if n == 0:
        return []
    red = _Reducer()
    raw = []
    for j, col in enumerate(columns):
        if not col:
            raw.append({j: Q(1)})
            continue
        combo = red.feed(col, j)
        if combo is not None:
            raw.append(combo)
    if not raw:
        return []
    dense = []
    for combo in raw:
        vec = [Q(0)] * n
        for j, v in combo.items():
            vec[j] = v
        dense.append(vec)
    red_basis, _ = rref(dense)
    return [row for row in red_basis if any(row)]


def solve_in_span(columns, target):
    """Coefficients x with sum_j x_j col_j == target, or None.

    When the solution is not unique the one produced by the elimination
    order is returned (deterministic).
    """
    n = len(columns)
    red = _Reducer()
    for j, col in enumerate(columns):
        if col:
            red.feed(col, j)
    combo = red.feed(dict(target), "__t__") if target else {"__t__": Q(1)}
    if combo is None:
        return None  # target created a pivot: outside the span
    scale = combo.pop("__t__")
    return [
        -combo.get(j, Q(0)) / scale if j in combo else Q(0) for j in range(n)
    ]


def rref(rows):
    """Reduced row echelon form (dense); returns (rref, pivot columns)."""
    mat = [list(r) for r in rows]
    nr = len(mat)
    nc = len(mat[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][c]
        if pv != 1:
            mat[r] = [x / pv for x in mat[r]]
        for i in range(nr):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    return mat, pivots


def combine_columns(vec, columns) -> dict:
    out: dict = {}
    for x, col in zip(vec, columns):
        if not x:
            continue
        for k, v in col.items():
            nv = out.get(k, Q(0)) + x * v
            if nv:
                out[k] = nv
            elif k in out:
                del out[k]
    return out


def image_dim_inside(columns, inside_keys) -> int:
    """dim( span(columns) ∩ span of coordinate rows `inside_keys` )."""
    if not columns:
        return 0
    inside = set(inside_keys)
    outside_cols = [
        {k: v for k, v in col.items() if k not in inside} for col in columns
    ]
    null = nullspace_columns(outside_cols)
    if not null:
        return 0
    combos = [combine_columns(vec, columns) for vec in null]
    return rank_columns([c for c in combos if c])


def span_inside(columns, inside_keys):
    """A basis of span(columns) ∩ coordinate span of `inside_keys`."""
    if not columns:
        return []
    inside = set(inside_keys)
    outside_cols = [
        {k: v for k, v in col.items() if k not in inside} for col in columns
    ]
    null = nullspace_columns(outside_cols)
    out = []
    red = _Reducer()
    for vec in null:
        combo = combine_columns(vec, columns)
        if combo and red.feed(combo, len(out)) is None:
            out.append(combo)
    return out


def intersection_dim(cols_a, cols_b) -> int:
    """dim( span(cols_a) ∩ span(cols_b) ), exact."""
    if not cols_a or not cols_b:
        return 0
    stacked = [dict(c) for c in cols_a]
    stacked += [{k: -v for k, v in c.items()} for c in cols_b]
    null = nullspace_columns(stacked)
    if not null:
        return 0
    na = len(cols_a)
    vecs = []
    for vec in null:
        combo = combine_columns(vec[:na], cols_a)
        if combo:
            vecs.append(combo)
    return rank_columns(vecs)


def columns_as_triplets(columns, row_order=None):
    """Sparse triplet export: (row, col, numerator, denominator)."""
    keys = set()
    for col in columns:
        keys.update(col)
    if row_order is None:
        rows = sorted(keys)
    else:
        index = {k: i for i, k in enumerate(row_order)}
        rows = sorted(keys, key=lambda k: index[k])
    rix = {k: i for i, k in enumerate(rows)}
    out = []
    for j, col in enumerate(columns):
        for k, v in sorted(col.items()):
            out.append((rix[k], j, v.numerator, v.denominator))
    out.sort()
    return out, rows
