"""Bangles, their transformation group, and the canonical building blocks.

A bangle is a matrix split into vertical strips with exactly one boxed
square strip.  Two bangles of the same format are *congruent (mode "star")
or similar (mode "sim") when an upper block-triangular nonsingular S maps
one to the other by

    B = S_kk^* . A . S      (star)      B = S_kk^{-1} . A . S     (sim)

with S_kk the diagonal block sitting on the boxed strip.  Witness objects
carry that S explicitly so every claimed equivalence can be replayed and
checked.
"""

from dataclasses import dataclass

from .errors import (InvariantViolation, LayoutMismatch, ShapeMismatch,
                     SingularBlock, SingularRegularPart)
from .matrix import Mat, is_nonsingular, mats_close

STAR = "star"
SIM = "sim"


class Bangle:
    """Vertical strips sharing one row count; strips[boxed] is square."""

    __slots__ = ("field", "strips", "boxed")

    def __init__(self, field, strips, boxed):
        strips = tuple(strips)
        if not strips:
            raise InvariantViolation("a bangle needs at least one strip")
        if not 0 <= boxed < len(strips):
            raise InvariantViolation(f"boxed index {boxed} out of range")
        n = strips[boxed].rows
        if strips[boxed].cols != n:
            raise InvariantViolation("the boxed strip must be square")
        for s in strips:
            if s.rows != n:
                raise InvariantViolation("all strips must share the row count")
            if s.field != field:
                raise InvariantViolation("strip field mismatch")
        self.field = field
        self.strips = strips
        self.boxed = boxed

    # ---- shape ----------------------------------------------------------

    @property
    def t(self):
        return len(self.strips)

    @property
    def n_rows(self):
        return self.strips[self.boxed].rows

    @property
    def widths(self):
        return tuple(s.cols for s in self.strips)

    @property
    def total_cols(self):
        return sum(self.widths)

    @property
    def box(self):
        return self.strips[self.boxed]

    def same_format(self, other):
        return (self.field == other.field and self.boxed == other.boxed
                and self.widths == other.widths and self.n_rows == other.n_rows)

    # ---- conversions -----------------------------------------------------

    def dense(self):
        return Mat.hstack(self.field, self.strips)

    @staticmethod
    def from_dense(field, mat, widths, boxed):
        if sum(widths) != mat.cols:
            raise ShapeMismatch("strip widths do not sum to the column count")
        strips, c = [], 0
        for w in widths:
            strips.append(mat.block(0, mat.rows, c, c + w))
            c += w
        return Bangle(field, strips, boxed)

    def __eq__(self, other):
        if not isinstance(other, Bangle):
            return NotImplemented
        return (self.same_format(other)
                and all(a == b for a, b in zip(self.strips, other.strips)))

    def __repr__(self):
        parts = []
        for i, s in enumerate(self.strips):
            txt = repr(s)
            parts.append(f"[{txt}]" if i == self.boxed else txt)
        return f"Bangle<{self.n_rows} rows | " + " | ".join(parts) + ">"

    def close_to(self, other, tol):
        return (self.same_format(other)
                and all(mats_close(a, b, tol) for a, b in zip(self.strips, other.strips)))

    def max_abs(self):
        return max((s.max_abs() for s in self.strips), default=0.0)


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

class Witness:
    """Nonsingular upper block-triangular S certifying an equivalence.

    Stored as one dense matrix over the total column count, together with
    the strip partition, the boxed index and the mode.
    """

    __slots__ = ("mode", "partition", "boxed", "mat", "_offsets")

    def __init__(self, mode, partition, boxed, mat, check=True):
        if mode not in (STAR, SIM):
            raise InvariantViolation(f"unknown mode {mode!r}")
        self.mode = mode
        self.partition = tuple(partition)
        self.boxed = boxed
        self.mat = mat
        n = sum(self.partition)
        self._offsets = self._make_offsets(self.partition)
        if mat.shape != (n, n):
            raise ShapeMismatch("witness matrix does not match the partition")
        if check:
            self.validate()

    @staticmethod
    def _make_offsets(partition):
        offs, c = [], 0
        for w in partition:
            offs.append(c)
            c += w
        offs.append(c)
        return offs

    @staticmethod
    def identity(field, mode, partition, boxed):
        return Witness(mode, partition, boxed,
                       Mat.identity(field, sum(partition)), check=False)

    def block(self, i, j):
        o = self._offsets
        return self.mat.block(o[i], o[i + 1], o[j], o[j + 1])

    def validate(self):
        f = self.mat.field
        o = self._offsets
        scale = max(self.mat.max_abs(), 1.0) if f.kind == "C" else None
        for i in range(len(self.partition)):
            for j in range(i):
                blk = self.block(i, j)
                if not blk.is_zero(scale):
                    raise InvariantViolation("witness is not upper block-triangular")
        for i in range(len(self.partition)):
            if not is_nonsingular(self.block(i, i)):
                raise SingularBlock(f"witness diagonal block {i} is singular")

    def diagonal_block(self):
        return self.block(self.boxed, self.boxed)

    def apply(self, bangle):
        """S_kk^* A S (star) or S_kk^{-1} A S (sim)."""
        if bangle.widths != self.partition or bangle.boxed != self.boxed:
            raise ShapeMismatch("witness partition does not match the bangle")
        skk = self.diagonal_block()
        left = skk.conj_transpose() if self.mode == STAR else skk.inverse()
        dense = left @ bangle.dense() @ self.mat
        return Bangle.from_dense(bangle.field, dense, self.partition, self.boxed)

    def then(self, other):
        """Witness equal to applying self first, then other."""
        if (self.partition != other.partition or self.boxed != other.boxed
                or self.mode != other.mode):
            raise ShapeMismatch("cannot compose witnesses of different formats")
        return Witness(self.mode, self.partition, self.boxed,
                       self.mat @ other.mat, check=False)

    def inverse(self):
        return Witness(self.mode, self.partition, self.boxed,
                       self.mat.inverse(), check=False)


# ---------------------------------------------------------------------------
# elementary transformations (generators of the group)
# ---------------------------------------------------------------------------

@dataclass
class RowAndBox:
    """Row transformation E of the whole matrix plus the matching column
    transformation of the boxed strip (E A_k E^* or E A_k E^{-1})."""
    e: Mat
    mode: str


@dataclass
class ColsInStrip:
    """Arbitrary column transformation T inside one (possibly boxed) strip;
    for the boxed strip this is only legal as part of a RowAndBox pair, so
    the index must be unboxed."""
    strip: int
    t: Mat


@dataclass
class ColCombAdd:
    """Add columns of strip i, combined by C, into strip j (i < j)."""
    i: int
    j: int
    c: Mat


def transformation_witness(tr, field, partition, boxed, mode):
    """Render an elementary transformation as a Witness."""
    n = sum(partition)
    offs = Witness._make_offsets(partition)
    if isinstance(tr, RowAndBox):
        if tr.e.shape != (partition[boxed], partition[boxed]):
            raise ShapeMismatch("row transform must match the boxed strip size")
        if not is_nonsingular(tr.e):
            raise SingularBlock("row transform is singular")
        skk = tr.e.conj_transpose() if mode == STAR else tr.e.inverse()
        m = Mat.identity(field, n)
        o = offs[boxed]
        for a in range(skk.rows):
            row = m.data[o + a]
            for b in range(skk.cols):
                row[o + b] = skk.data[a][b]
        return Witness(mode, partition, boxed, m, check=False)
    if isinstance(tr, ColsInStrip):
        if tr.strip == boxed:
            raise InvariantViolation("boxed-strip column ops must pair with a row op")
        if not is_nonsingular(tr.t):
            raise SingularBlock("column transform is singular")
        m = Mat.identity(field, n)
        o = offs[tr.strip]
        for a in range(tr.t.rows):
            for b in range(tr.t.cols):
                m.data[o + a][o + b] = tr.t.data[a][b]
        return Witness(mode, partition, boxed, m, check=False)
    if isinstance(tr, ColCombAdd):
        if not tr.i < tr.j:
            raise InvariantViolation("column additions must go left to right")
        if tr.c.shape != (partition[tr.i], partition[tr.j]):
            raise ShapeMismatch("bad coefficient shape for column addition")
        m = Mat.identity(field, n)
        oi, oj = offs[tr.i], offs[tr.j]
        for a in range(tr.c.rows):
            row = m.data[oi + a]
            for b in range(tr.c.cols):
                row[oj + b] = tr.c.data[a][b]
        return Witness(mode, partition, boxed, m, check=False)
    raise TypeError(f"not a transformation: {tr!r}")


def apply_transformation(tr, bangle, mode):
    w = transformation_witness(tr, bangle.field, bangle.widths, bangle.boxed, mode)
    return w.apply(bangle)


def apply(transformation, bangle, mode=None):
    """Apply an elementary transformation or a whole witness to a bangle."""
    if isinstance(transformation, Witness):
        return transformation.apply(bangle)
    if mode is None:
        mode = getattr(transformation, "mode", None)
    if mode not in (STAR, SIM):
        raise InvariantViolation("specify star or sim for elementary transformations")
    return apply_transformation(transformation, bangle, mode)


def compose_transformations(trs, field, partition, boxed, mode):
    w = Witness.identity(field, mode, partition, boxed)
    for tr in trs:
        w = w.then(transformation_witness(tr, field, partition, boxed, mode))
    return w


def permutation_witness(field, mode, partition, boxed, row_perm, col_perms):
    """Admissible permutation as a witness.

    row_perm maps old row index -> new row index and is applied to the boxed
    strip's columns as well; col_perms[i] does the same for the columns of
    each unboxed strip i (entries for the boxed strip are ignored).
    """
    n_k = partition[boxed]
    if sorted(row_perm) != list(range(n_k)):
        raise InvariantViolation("row_perm is not a permutation")
    blocks = []
    for i, w in enumerate(partition):
        perm = row_perm if i == boxed else col_perms.get(i, list(range(w)))
        if sorted(perm) != list(range(w)):
            raise InvariantViolation(f"column permutation for strip {i} is invalid")
        p = Mat.zeros(field, w, w)
        for old, new in enumerate(perm):
            p.data[old][new] = field.one()
        blocks.append(p)
    m = blocks[0]
    for b in blocks[1:]:
        m = m.direct_sum(b)
    return Witness(mode, partition, boxed, m, check=False)


def admissible_permute(bangle, row_perm, col_perms, mode=STAR):
    """Permute rows of the whole bangle (same permutation on boxed columns)
    and columns inside unboxed strips.  Implies both *congruence and
    similarity; the returned pair is (result, witness)."""
    w = permutation_witness(bangle.field, mode, bangle.widths, bangle.boxed,
                            row_perm, col_perms)
    return w.apply(bangle), w


# ---------------------------------------------------------------------------
# canonical building blocks
# ---------------------------------------------------------------------------

def gamma(field, n):
    """The anti-triangular +-1 block whose cosquare is a single Jordan block
    with eigenvalue (-1)^(n+1)."""
    if n < 1:
        raise ValueError("gamma needs n >= 1")
    g = Mat.zeros(field, n, n)
    one = field.one()
    for b in range(1, n + 1):          # b-th row from the bottom
        val = one if b % 2 == 1 else field.neg(one)
        i = n - b
        g.data[i][b - 1] = val
        if b < n:
            g.data[i][b] = val
    return g


def delta(field, n):
    """Symmetric alternative block: ones on the anti-diagonal, i just below."""
    if n < 1:
        raise ValueError("delta needs n >= 1")
    iu = field.imag_unit()
    d = Mat.zeros(field, n, n)
    for i in range(n):
        d.data[i][n - 1 - i] = field.one()
        if n - i < n:
            d.data[i][n - i] = iu
    return d


def jordan(field, n, lam):
    if n < 1:
        raise ValueError("jordan needs n >= 1")
    j = Mat.zeros(field, n, n)
    for i in range(n):
        j.data[i][i] = lam
        if i + 1 < n:
            j.data[i][i + 1] = field.one()
    return j


def e_col(field, q):
    """The q-by-1 column with a single 1 in the last row; e_col(0) is 0x1."""
    if q < 0:
        raise ValueError("e_col needs q >= 0")
    e = Mat.zeros(field, q, 1)
    if q:
        e.data[q - 1][0] = field.one()
    return e


# ---------------------------------------------------------------------------
# decomposition summands
# ---------------------------------------------------------------------------

PLAIN = "plain"
E_IN_STRIP = "e_in_strip"


@dataclass(frozen=True)
class SingularSummand:
    """One indecomposable singular summand.

    attachment "plain" is a lone nilpotent Jordan strip (q >= 1);
    "e_in_strip" carries an E_q column in unboxed strip `strip` (q >= 0,
    where q = 0 encodes a single zero column in that strip)."""

    attachment: str
    q: int
    strip: int = -1          # unboxed strip index, only for e_in_strip

    def __post_init__(self):
        if self.attachment == PLAIN:
            if self.q < 1 or self.strip != -1:
                raise InvariantViolation("plain summands need q >= 1 and no strip")
        elif self.attachment == E_IN_STRIP:
            if self.q < 0 or self.strip < 0:
                raise InvariantViolation("e_in_strip summands need q >= 0 and a strip")
        else:
            raise InvariantViolation(f"unknown attachment {self.attachment!r}")

    def sort_key(self):
        # canonical output order: attachment strip (plain counts as the box,
        # sorted first), then kind, then q
        return (-1 if self.attachment == PLAIN else self.strip,
                0 if self.attachment == PLAIN else 1,
                self.q)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


def summand_bangle(field, summand, t, k):
    """The literal bangle of one singular summand in a (t, k) layout."""
    q = summand.q
    strips = []
    for i in range(t):
        if i == k:
            strips.append(jordan(field, q, field.zero()) if q else Mat.zeros(field, 0, 0))
        elif summand.attachment == E_IN_STRIP and i == summand.strip:
            strips.append(e_col(field, q))
        else:
            strips.append(Mat.zeros(field, q, 0))
    if summand.attachment == E_IN_STRIP and summand.strip == k:
        raise InvariantViolation("E_q cannot sit in the boxed strip")
    return Bangle(field, strips, k)


def regular_bangle(field, kmat, t, k):
    """K in the box, every other strip of width zero."""
    if not is_nonsingular(kmat):
        raise SingularRegularPart("the regular part must be nonsingular")
    p = kmat.rows
    strips = [kmat if i == k else Mat.zeros(field, p, 0) for i in range(t)]
    return Bangle(field, strips, k)


def block_direct_sum(a, b):
    """Strip-wise 2x2 block-diagonal stacking of two equal-format bangles."""
    if a.field != b.field or a.t != b.t or a.boxed != b.boxed:
        raise LayoutMismatch("block-direct sum needs matching layouts")
    strips = [sa.direct_sum(sb) for sa, sb in zip(a.strips, b.strips)]
    return Bangle(a.field, strips, a.boxed)


def empty_bangle(field, t, k):
    return Bangle(field, [Mat.zeros(field, 0, 0) for _ in range(t)], k)


def assemble_decomposition(field, kmat, summands, t, k):
    """regular_bangle(K) (+) the singular summands, in the given order."""
    out = (regular_bangle(field, kmat, t, k) if kmat.rows
           else empty_bangle(field, t, k))
    for s in summands:
        out = block_direct_sum(out, summand_bangle(field, s, t, k))
    return out
