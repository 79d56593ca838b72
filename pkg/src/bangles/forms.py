"""Forms on U x V and (V/U) x V, and mappings between V, U, and V/U.

A form matrix is the block row [A | B] with A of size m x m taken on a basis
of V whose first (U x V) or last ((V/U) x V) vectors span U.  A mapping
matrix is [A | B] or the stacked [A over B], again with A square of size m.
Each kind translates to a two-strip bangle; *congruence handles forms,
similarity handles mappings, and transposes carry no conjugation because
mapping equivalence never involves the involution.
"""

from dataclasses import dataclass

from .bangle import Bangle, SIM, STAR, Witness
from .canonical import canonical_bangle
from .errors import ShapeMismatch
from .matrix import Mat, mats_close

U_X_V = "UxV"
QUOT_X_V = "QuotxV"
U_TO_V = "UtoV"
V_TO_U = "VtoU"
Q_TO_V = "QtoV"
V_TO_Q = "VtoQ"

FORM_KINDS = (U_X_V, QUOT_X_V)
MAPPING_KINDS = (U_TO_V, V_TO_U, Q_TO_V, V_TO_Q)
_STACKED = (U_TO_V, Q_TO_V)


@dataclass
class FormMatrix:
    kind: str
    a: Mat                     # m x m
    b: Mat                     # m x (n - m)

    def __post_init__(self):
        if self.kind not in FORM_KINDS:
            raise ShapeMismatch(f"unknown form kind {self.kind!r}")
        if self.a.rows != self.a.cols or self.b.rows != self.a.rows:
            raise ShapeMismatch("form blocks must be [A|B] with square A")

    @property
    def field(self):
        return self.a.field

    def __eq__(self, other):
        return (isinstance(other, FormMatrix) and self.kind == other.kind
                and self.a == other.a and self.b == other.b)

    def close_to(self, other, tol):
        return (self.kind == other.kind and mats_close(self.a, other.a, tol)
                and mats_close(self.b, other.b, tol))


@dataclass
class MappingMatrix:
    kind: str
    a: Mat                     # m x m
    b: Mat                     # (n-m) x m when stacked, m x (n-m) otherwise

    def __post_init__(self):
        if self.kind not in MAPPING_KINDS:
            raise ShapeMismatch(f"unknown mapping kind {self.kind!r}")
        if self.a.rows != self.a.cols:
            raise ShapeMismatch("the A block must be square")
        if self.kind in _STACKED:
            if self.b.cols != self.a.cols:
                raise ShapeMismatch("stacked mapping needs B with the width of A")
        elif self.b.rows != self.a.rows:
            raise ShapeMismatch("side-by-side mapping needs B with the height of A")

    @property
    def field(self):
        return self.a.field

    def __eq__(self, other):
        return (isinstance(other, MappingMatrix) and self.kind == other.kind
                and self.a == other.a and self.b == other.b)

    def close_to(self, other, tol):
        return (self.kind == other.kind and mats_close(self.a, other.a, tol)
                and mats_close(self.b, other.b, tol))


# ---------------------------------------------------------------------------
# translations to and from bangles
# ---------------------------------------------------------------------------

def bangle_of_form(form):
    if form.kind == U_X_V:
        return Bangle(form.field, [form.a, form.b], 0)
    return Bangle(form.field, [form.b, form.a], 1)


def form_of_bangle(bangle, kind):
    if bangle.t != 2:
        raise ShapeMismatch("form bangles have exactly two strips")
    if kind == U_X_V:
        if bangle.boxed != 0:
            raise ShapeMismatch("U x V forms box the first strip")
        return FormMatrix(kind, bangle.strips[0], bangle.strips[1])
    if bangle.boxed != 1:
        raise ShapeMismatch("(V/U) x V forms box the second strip")
    return FormMatrix(kind, bangle.strips[1], bangle.strips[0])


def bangle_of_mapping(mapping):
    """Similarity-mode bangle; stacked kinds transpose without conjugation."""
    a, b = mapping.a, mapping.b
    if mapping.kind == U_TO_V:
        return Bangle(mapping.field, [b.transpose(), a.transpose()], 1)
    if mapping.kind == V_TO_U:
        return Bangle(mapping.field, [a, b], 0)
    if mapping.kind == Q_TO_V:
        return Bangle(mapping.field, [a.transpose(), b.transpose()], 0)
    return Bangle(mapping.field, [b, a], 1)    # V -> V/U


def mapping_of_bangle(bangle, kind):
    if bangle.t != 2:
        raise ShapeMismatch("mapping bangles have exactly two strips")
    if kind == U_TO_V:
        if bangle.boxed != 1:
            raise ShapeMismatch("U -> V boxes the second strip")
        return MappingMatrix(kind, bangle.strips[1].transpose(),
                             bangle.strips[0].transpose())
    if kind == V_TO_U:
        if bangle.boxed != 0:
            raise ShapeMismatch("V -> U boxes the first strip")
        return MappingMatrix(kind, bangle.strips[0], bangle.strips[1])
    if kind == Q_TO_V:
        if bangle.boxed != 0:
            raise ShapeMismatch("V/U -> V boxes the first strip")
        return MappingMatrix(kind, bangle.strips[0].transpose(),
                             bangle.strips[1].transpose())
    if bangle.boxed != 1:
        raise ShapeMismatch("V -> V/U boxes the second strip")
    return MappingMatrix(kind, bangle.strips[1], bangle.strips[0])


# ---------------------------------------------------------------------------
# canonicalization
# ---------------------------------------------------------------------------

def canonicalize_form(form):
    """Block-direct sum of a regular part and nilpotent [J|0] / [J|E]
    summands, with the regular part in complex canonical blocks where the
    field allows; the report carries the regularization witness."""
    out, report = canonical_bangle(bangle_of_form(form), STAR)
    return form_of_bangle(out, form.kind), report


def canonicalize_mapping(mapping):
    out, report = canonical_bangle(bangle_of_mapping(mapping), SIM)
    return mapping_of_bangle(out, mapping.kind), report


# ---------------------------------------------------------------------------
# change-of-basis verification
# ---------------------------------------------------------------------------

@dataclass
class BasisChange:
    """The (S, P, Q) data of a legal change of basis for one kind."""
    s: Mat
    q: Mat
    p: Mat


def _two_by_two(field, tl, tr, bl, br):
    top = Mat.hstack(field, [tl, tr])
    bot = Mat.hstack(field, [bl, br])
    return Mat.vstack(field, [top, bot])


def transform_form(form, change):
    """Apply the change-of-basis law of the form's kind."""
    f = form.field
    s, p, q = change.s, change.p, change.q
    m = form.a.rows
    nm = form.b.cols
    wide = Mat.hstack(f, [form.a, form.b])
    if form.kind == U_X_V:
        if p.shape != (m, nm):
            raise ShapeMismatch("P must be m x (n-m) for U x V")
        r = _two_by_two(f, s, p, Mat.zeros(f, nm, m), q)
    else:
        if p.shape != (nm, m):
            raise ShapeMismatch("P must be (n-m) x m for (V/U) x V")
        r = _two_by_two(f, s, Mat.zeros(f, m, nm), p, q)
    out = s.conj_transpose() @ wide @ r
    return FormMatrix(form.kind, out.block(0, m, 0, m), out.block(0, m, m, m + nm))


def transform_mapping(mapping, change):
    f = mapping.field
    s, p, q = change.s, change.p, change.q
    m = mapping.a.rows
    if mapping.kind in _STACKED:
        nm = mapping.b.rows
        tall = Mat.vstack(f, [mapping.a, mapping.b])
        if mapping.kind == U_TO_V:
            if p.shape != (m, nm):
                raise ShapeMismatch("P must be m x (n-m) for U -> V")
            left = _two_by_two(f, s.inverse(), p, Mat.zeros(f, nm, m), q.inverse())
        else:
            if p.shape != (nm, m):
                raise ShapeMismatch("P must be (n-m) x m for V/U -> V")
            left = _two_by_two(f, s.inverse(), Mat.zeros(f, m, nm), p, q.inverse())
        out = left @ tall @ s
        return MappingMatrix(mapping.kind, out.block(0, m, 0, m),
                             out.block(m, m + nm, 0, m))
    nm = mapping.b.cols
    wide = Mat.hstack(f, [mapping.a, mapping.b])
    if mapping.kind == V_TO_U:
        if p.shape != (m, nm):
            raise ShapeMismatch("P must be m x (n-m) for V -> U")
        r = _two_by_two(f, s, p, Mat.zeros(f, nm, m), q)
    else:
        if p.shape != (nm, m):
            raise ShapeMismatch("P must be (n-m) x m for V -> V/U")
        r = _two_by_two(f, s, Mat.zeros(f, m, nm), p, q)
    out = s.inverse() @ wide @ r
    return MappingMatrix(mapping.kind, out.block(0, m, 0, m),
                         out.block(0, m, m, m + nm))


def verify_equivalence(first, second, change, tol=None):
    """True iff the kind's transformation law maps `first` to `second`
    exactly (exact fields) or within tolerance (ComplexFloat)."""
    if type(first) is not type(second) or first.kind != second.kind:
        raise ShapeMismatch("cannot compare different kinds")
    if isinstance(first, FormMatrix):
        moved = transform_form(first, change)
    else:
        moved = transform_mapping(first, change)
    if first.field.is_exact:
        return moved == second
    if tol is None:
        scale = max(first.a.max_abs(), first.b.max_abs(), 1.0)
        tol = 10 * first.field.eps * scale
    return moved.close_to(second, tol)


def witness_of_change(form_or_mapping, change):
    """The bangle witness realizing a legal change of basis (used to move
    certificates between the form picture and the bangle picture)."""
    obj = form_or_mapping
    f = obj.field
    s, p, q = change.s, change.p, change.q
    if isinstance(obj, FormMatrix):
        mode = STAR
        if obj.kind == U_X_V:
            blocks = (s, p, q)          # [[S, P], [0, Q]] on [boxed A | B]
            widths = (obj.a.rows, obj.b.cols)
            boxed = 0
        else:
            blocks = (q, p, s)          # [[Q, P], [0, S]] on [B | boxed A]
            widths = (obj.b.cols, obj.a.rows)
            boxed = 1
    else:
        mode = SIM
        if obj.kind == V_TO_U:
            blocks, widths, boxed = (s, p, q), (obj.a.rows, obj.b.cols), 0
        elif obj.kind == V_TO_Q:
            blocks, widths, boxed = (q, p, s), (obj.b.cols, obj.a.rows), 1
        elif obj.kind == U_TO_V:
            blocks = (q.inverse().transpose(), p.transpose(),
                      s.inverse().transpose())
            widths, boxed = (obj.b.rows, obj.a.rows), 1
        else:                            # Q_TO_V
            blocks = (s.inverse().transpose(), p.transpose(),
                      q.inverse().transpose())
            widths, boxed = (obj.a.rows, obj.b.rows), 0
    tl, tr, br = blocks
    mat = _two_by_two(f, tl, tr, Mat.zeros(f, br.rows, tl.cols), br)
    return Witness(mode, widths, boxed, mat)
