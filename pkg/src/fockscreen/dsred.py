"""The reduction complex: fermion extension, differential, cohomology.

The complex over a base module is the base tensored with the charged
fermions, bosonized on a rank-one lattice direction, with differential
the residue of (current + 1) e^{fermion}.  Cohomology is computed per
slot (degree, weight [, charges preserved by the differential]) from
exact state-level images:

  Z = kernel of d on the slot's columns,
  B = image of the previous slot intersected with the slot's span,

both over the rationals.  Boundary effects of the charge window can
only make B too small, never too large, so computed dimensions are
upper bounds that stabilize; a slot is *certified* when its value is
unchanged under shrinking the window by one differential shift and its
degree is interior to the degree bounds.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import D2NotZero, StabilityError
from .fockspace import Window
from .linalg import (
    combine_columns,
    image_dim_inside,
    nullspace_columns,
    rank_columns,
    span_inside,
)
from .model import Model
from .screenings import KernelTower
from .vertexops import DressedVector, ModeOperator

Q = Fraction


class DSComplex:
    """Windowed cochain complex of a base module with the fermion."""

    def __init__(self, model: Model, base_spec, window: Window, screenings=(),
                 flat=False, check_d2=True):
        self.model = model
        self.spec = model.ds_spec_for(base_spec, flat=flat)
        self.window = window
        self.kt = KernelTower(list(screenings), self.spec, window)
        self.d = model.residue(model.dds_dv, self.spec.osc, "d_ds")
        names = self.kt.charge_names()
        self.deg_ix = names.index("deg")
        self.preserved = self._preserved_charges(names)
        self.slots = {}
        for key in sorted(self.kt.piece_basis):
            self.slots.setdefault(self._slot_of(key), []).append(key)
        self._images = {}
        if check_d2:
            self.verify_d_squared()

    def _preserved_charges(self, names):
        out = []
        for ix, (name, vec) in enumerate(self.kt.spec.charges):
            if name == "deg":
                continue
            shifts = {vec.pair(lam) for _, _, lam in self.model.dds_dv.terms}
            if shifts == {Q(0)}:
                out.append(ix)
        return tuple(out)

    def _slot_of(self, piece_key):
        weight, charges = piece_key
        deg = int(charges[self.deg_ix])
        extra = tuple(charges[i] for i in self.preserved)
        return (deg, weight) + extra

    def slot_columns(self, slot):
        cols = []
        for key in self.slots.get(slot, []):
            cols.extend(self.kt.piece_columns(key))
        return cols

    def slot_state_keys(self, slot):
        keys = []
        for key in self.slots.get(slot, []):
            keys.extend(self.kt.tower.piece_states(key))
        return keys

    def d_apply(self, col: dict) -> dict:
        return self.d.apply_sum(col)

    def slot_images(self, slot):
        got = self._images.get(slot)
        if got is None:
            got = [self.d_apply(c) for c in self.slot_columns(slot)]
            self._images[slot] = got
        return got

    def verify_d_squared(self):
        for slot in sorted(self.slots):
            for once in self.slot_images(slot):
                if self.d_apply(once):
                    raise D2NotZero(f"d^2 != 0 on slot {slot}")

    def cohomology(self) -> dict:
        """{slot: dim H} with slot = (degree, weight, preserved...).

        B is measured as image-inside-the-slot's-coordinate-span; images
        of kernel columns are automatically kernel vectors (the
        differential commutes with the screenings), and per-piece kernel
        bases span all graded kernel vectors, so no separate membership
        solve is needed.
        """
        out = {}
        for slot in sorted(self.slots):
            cols = self.slot_columns(slot)
            if not cols:
                continue
            zdim = len(nullspace_columns(self.slot_images(slot)))
            prev = (slot[0] - 1,) + slot[1:]
            bdim = image_dim_inside(
                self.slot_images(prev) if prev in self.slots else [],
                self.slot_state_keys(slot),
            )
            out[slot] = zdim - bdim
        return out

    def representatives(self, slot):
        """Cocycle representatives of the slot, one per class."""
        cols = self.slot_columns(slot)
        null = nullspace_columns(self.slot_images(slot))
        zvecs = [combine_columns(vec, cols) for vec in null]
        prev = (slot[0] - 1,) + slot[1:]
        prev_imgs = self.slot_images(prev) if prev in self.slots else []
        bound = span_inside(prev_imgs, self.slot_state_keys(slot))
        reps = []
        base_rank = rank_columns(bound)
        for z in zvecs:
            if z and rank_columns(bound + reps + [z]) > base_rank + len(reps):
                reps.append(z)
        return reps


# -- public operations ----------------------------------------------------------


def build_complex(model: Model, base_spec, window: Window, screenings=(), flat=False) -> DSComplex:
    return DSComplex(model, base_spec, window, screenings, flat=flat)


def cohomology_report(model: Model, base_spec, window: Window, screenings=(),
                      flat=False, shrink=None) -> dict:
    """Cohomology with certification by window stability.

    Computes the complex on `window` and on a window shrunk by the
    differential's charge shifts (default: h by 2, cmom by 1, deg by 1);
    slots agreeing across both and interior in degree are certified.
    """
    cx = DSComplex(model, base_spec, window, screenings, flat=flat)
    full = cx.cohomology()
    if shrink is None:
        shrink = {}
        for name, lo, hi in window.charge_bounds:
            vec = cx.kt.spec.charge_vector(name)
            delta = max(abs(vec.pair(lam)) for _, _, lam in model.dds_dv.terms)
            shrink[name] = delta
    small_win = window.shrink(charge_by=shrink)
    cx2 = DSComplex(model, base_spec, small_win, screenings, flat=flat, check_d2=False)
    small = cx2.cohomology()
    degb = window.bound_for("deg")
    degs = small_win.bound_for("deg")
    entries = []
    for slot in sorted(small):
        deg = slot[0]
        interior = (
            degb is not None
            and degs is not None
            and degs[0] < deg < degs[1]
        )
        stable = full.get(slot) == small[slot]
        entries.append(
            {
                "degree": deg,
                "weight": str(slot[1]),
                "extra": [str(x) for x in slot[2:]],
                "dim": small[slot],
                "certified": bool(interior and stable),
            }
        )
    return {"complex": cx, "entries": entries, "full": full, "small": small}


def verify_homotopy_identity(model: Model) -> dict:
    """The complex grading vector is exact: d(eta) equals it, exactly."""
    osc = model.osc_ds
    d = model.residue(model.dds_dv, osc, "d_ds")
    got = d.apply_dressed(model.eta_dv)
    target = model.omega_c_dv
    match = got == target
    closed = d.apply_dressed(target).is_zero()
    weights = {
        "eta": str(model.eta_dv.weight(model.ds_flat)),
        "omega": str(target.weight(model.ds_flat)),
    }
    return {
        "identity": match,
        "d_omega_zero": closed,
        "weights": weights,
        "ok": match and closed and model.eta_dv.weight(model.ds_flat) == 2,
    }


def reduce_vp_report(model: Model, qmax, hmax, degmax=2) -> dict:
    """Degree-zero cohomology of the complex over the big algebra.

    The base is the joint-kernel tower (the screenings commute with the
    differential, so the kernel complex is a subcomplex; the commutation
    is implicitly verified by d^2 and the kernel membership of images).
    Returns graded H^0 dims, higher-degree entries, Euler numbers.
    """
    base = model.vp_route_a_ambient()
    win = Window.make(
        qmax, {"h": (-hmax, hmax), "deg": (-degmax, degmax)}
    )
    ops = [model.screening_s(model.osc_ds)]
    if model.p > 1:
        ops.insert(0, model.screening_qtilde(model.osc_ds))
    rep = cohomology_report(model, base, win, screenings=ops)
    h0 = {}
    higher = []
    euler = {}
    for e in rep["entries"]:
        w = Fraction(e["weight"])
        if e["degree"] == 0 and e["certified"]:
            h0[w] = h0.get(w, 0) + e["dim"]
        if e["degree"] != 0:
            higher.append(e)
        if e["certified"]:
            euler[w] = euler.get(w, 0) + (-1) ** (e["degree"] % 2) * e["dim"]
    return {
        "h0": {str(k): v for k, v in sorted(h0.items())},
        "h0_frac": h0,
        "higher": higher,
        "higher_vanish": all(
            e["dim"] == 0 for e in higher if e["certified"]
        ),
        "euler": {str(k): v for k, v in sorted(euler.items())},
        "entries": rep["entries"],
    }
