"""Left- and right-hand reductions with witness tracking.

Each reduction compresses part of a bangle into a rigid frame (staircase
identities, zero rows) plus a strictly smaller inner bangle, and returns

  * the inner bangle,
  * a Layout describing how the inner bangle sits inside the frame, and
  * a Witness on the outer bangle with  apply(witness, A) == layout.embed(inner).

The Layout also knows how to *lift* a witness acting on the inner bangle to
a witness on the outer bangle that preserves the frame; lifting is what lets
a full regularization replay every step on the original matrix instead of
re-running elimination.

Conventions (0-based):  the outer row space is split into horizontal blocks
``row_blocks`` (top to bottom); the boxed strip's columns are split
conformally, so box column blocks share indices with row blocks.  Exactly one
row block (``m_block``) carries the inner bangle's rows.  Every other row
block either owns a staircase identity in some unboxed strip (``frames``) or
is a block of all-zero rows.
"""

from dataclasses import dataclass, field as dc_field

from .bangle import Bangle, SIM, STAR, Witness
from .errors import InvariantViolation, ShapeMismatch
from .matrix import Mat, column_echelon_in_strip, row_compress, solve_right

LEFT_STAR = "left_star"
RIGHT_STAR = "right_star"
LEFT_SIM = "left_sim"
RIGHT_SIM = "right_sim"
TRIVIAL = "trivial"


def _offsets(widths):
    out, c = [], 0
    for w in widths:
        out.append(c)
        c += w
    out.append(c)
    return out


# ---------------------------------------------------------------------------
# layouts
# ---------------------------------------------------------------------------

@dataclass
class Layout:
    kind: str
    mode: str
    outer_widths: tuple
    outer_boxed: int
    row_blocks: tuple          # heights, top to bottom
    m_block: int               # which row block carries the inner rows
    inner_widths: tuple
    inner_boxed: int
    strip_loc: tuple           # per inner strip: ("box", col_block) | ("strip", j)
    frames: dict = dc_field(default_factory=dict)   # row block -> (outer strip, col start)
    box_solves_m_rows: bool = False

    @property
    def row_offsets(self):
        return _offsets(self.row_blocks)

    def rows_of(self, block):
        o = self.row_offsets
        return o[block], o[block + 1]

    def embed(self, inner, field=None):
        """Build the outer bangle holding `inner` inside the frame."""
        if self.kind == TRIVIAL:
            return inner
        f = field or inner.field
        if inner.widths != self.inner_widths or inner.boxed != self.inner_boxed:
            raise ShapeMismatch("inner bangle does not match the layout")
        n = sum(self.row_blocks)
        ro = self.row_offsets
        m0, m1 = self.rows_of(self.m_block)
        box_co = _offsets(self.row_blocks)  # box columns conformal with row blocks
        strips = []
        for j, w in enumerate(self.outer_widths):
            s = Mat.zeros(f, n, w)
            strips.append(s)
        # frame identities
        for rb, (j, c0) in self.frames.items():
            r0, _ = self.rows_of(rb)
            sz = self.row_blocks[rb]
            s = strips[j]
            for a in range(sz):
                s.data[r0 + a][c0 + a] = f.one()
        # inner content
        for a, loc in enumerate(self.strip_loc):
            src = inner.strips[a]
            if loc[0] == "box":
                cb = loc[1]
                dst = strips[self.outer_boxed]
                c0 = box_co[cb]
            else:
                dst = strips[loc[1]]
                c0 = 0
            for i in range(src.rows):
                row = dst.data[m0 + i]
                srow = src.data[i]
                for jj in range(src.cols):
                    row[c0 + jj] = srow[jj]
        return Bangle(f, strips, self.outer_boxed)

    def extract_inner(self, outer):
        """Read the inner bangle back out of an embedded outer bangle."""
        if self.kind == TRIVIAL:
            return outer
        m0, m1 = self.rows_of(self.m_block)
        box_co = _offsets(self.row_blocks)
        strips = []
        for a, loc in enumerate(self.strip_loc):
            w = self.inner_widths[a]
            if loc[0] == "box":
                c0 = box_co[loc[1]]
                strips.append(outer.strips[self.outer_boxed].block(m0, m1, c0, c0 + w))
            else:
                strips.append(outer.strips[loc[1]].block(m0, m1, 0, w))
        return Bangle(outer.field, strips, self.inner_boxed)

    # -- bookkeeping used by the final permutation sort ---------------------

    def embed_row_tags(self, inner_tags):
        """Propagate per-row regular/singular tags outward (frame rows are
        singular)."""
        if self.kind == TRIVIAL:
            return list(inner_tags)
        out = []
        for rb, h in enumerate(self.row_blocks):
            if rb == self.m_block:
                out.extend(inner_tags)
            else:
                out.extend([False] * h)
        return out

    def embed_col_tags(self, inner_col_tags):
        """Propagate per-column tags; returns a list per outer strip."""
        if self.kind == TRIVIAL:
            return [list(t) for t in inner_col_tags]
        box_co = _offsets(self.row_blocks)
        out = [[False] * w for w in self.outer_widths]
        for a, loc in enumerate(self.strip_loc):
            tags = inner_col_tags[a]
            if loc[0] == "box":
                c0 = box_co[loc[1]]
                out[self.outer_boxed][c0:c0 + len(tags)] = tags
            else:
                out[loc[1]][0:len(tags)] = tags
        return out

    # -- witness lifting -------------------------------------------------

    def lift(self, w_inner, inner_before):
        """Outer witness W with apply(W, embed(M)) == embed(apply(w_inner, M))."""
        if self.kind == TRIVIAL:
            return w_inner
        f = inner_before.field
        ws = Workspace(self.embed(inner_before, f), self.mode)
        cur = inner_before
        for elem in factor_witness(w_inner):
            nxt = _apply_elem_to_bangle(cur, elem, self.mode)
            target = self.embed(nxt, f)
            _translate_elem(self, elem, ws)
            _repair_to(self, ws, target)
            if f.is_exact:
                if ws.to_bangle() != target:
                    raise InvariantViolation("witness lift failed to preserve the frame")
            else:
                tol = 1000 * f.eps * max(target.max_abs(), 1.0)
                if not ws.to_bangle().close_to(target, tol):
                    raise InvariantViolation("witness lift drifted beyond tolerance")
                ws.overwrite(target)
            cur = nxt
        return ws.witness()


def layout_left_star(outer_widths, k0, strip_ranks, m):
    t = len(outer_widths)
    # row blocks top->bottom: (m, c_{k0-1}, ..., c_0)
    row_blocks = (m,) + tuple(strip_ranks[k0 - 1 - j] for j in range(k0))
    frames = {}
    for i in range(k0):
        frames[k0 - i] = (i, outer_widths[i] - strip_ranks[i])
    inner_widths = row_blocks + tuple(outer_widths[k0 + 1:])
    strip_loc = tuple(("box", a) for a in range(k0 + 1)) + \
        tuple(("strip", j) for j in range(k0 + 1, t))
    return Layout(LEFT_STAR, STAR, tuple(outer_widths), k0, row_blocks, 0,
                  inner_widths, 0, strip_loc, frames)


def layout_left_sim(outer_widths, k0, strip_ranks, m):
    t = len(outer_widths)
    row_blocks = tuple(strip_ranks) + (m,)      # (c_0, ..., c_{k0-1}, m)
    frames = {}
    for i in range(k0):
        frames[i] = (i, outer_widths[i] - strip_ranks[i])
    inner_widths = row_blocks + tuple(outer_widths[k0 + 1:])
    strip_loc = tuple(("box", a) for a in range(k0 + 1)) + \
        tuple(("strip", j) for j in range(k0 + 1, t))
    return Layout(LEFT_SIM, SIM, tuple(outer_widths), k0, row_blocks, k0,
                  inner_widths, k0, strip_loc, frames)


def layout_right_star(outer_widths, strip_ranks, leftover, r):
    t = len(outer_widths)
    # row blocks: (leftover, c_{t-1}, ..., c_1, r); strip j owns block t-j
    row_blocks = (leftover,) + tuple(reversed(strip_ranks)) + (r,)
    frames = {}
    for j in range(1, t):
        frames[t - j] = (j, outer_widths[j] - strip_ranks[j - 1])
    inner_widths = row_blocks
    strip_loc = tuple(("box", a) for a in range(t + 1))
    return Layout(RIGHT_STAR, STAR, tuple(outer_widths), 0, row_blocks, t,
                  inner_widths, t, strip_loc, frames, box_solves_m_rows=True)


def layout_right_sim(outer_widths, strip_ranks, leftover, r):
    t = len(outer_widths)
    row_blocks = (r,) + tuple(strip_ranks) + (leftover,)   # (r, c_1, ..., c_{t-1}, leftover)
    frames = {}
    for j in range(1, t):
        frames[j] = (j, outer_widths[j] - strip_ranks[j - 1])
    inner_widths = row_blocks
    strip_loc = tuple(("box", a) for a in range(t + 1))
    return Layout(RIGHT_SIM, SIM, tuple(outer_widths), 0, row_blocks, 0,
                  inner_widths, 0, strip_loc, frames, box_solves_m_rows=True)


def trivial_layout(bangle, mode):
    return Layout(TRIVIAL, mode, bangle.widths, bangle.boxed,
                  (bangle.n_rows,), 0, bangle.widths, bangle.boxed,
                  tuple(("strip", j) for j in range(bangle.t)))


# ---------------------------------------------------------------------------
# mutable working state: strips plus the accumulated witness
# ---------------------------------------------------------------------------

class Workspace:
    """A bangle being transformed in place, with the witness of everything
    done so far accumulated as one dense matrix."""

    def __init__(self, bangle, mode):
        self.field = bangle.field
        self.mode = mode
        self.partition = bangle.widths
        self.boxed = bangle.boxed
        self.n = bangle.n_rows
        self.strips = [s.copy() for s in bangle.strips]
        total = sum(self.partition)
        self.acc = Mat.identity(self.field, total)
        self.offs = _offsets(self.partition)
        # rank floor: entries below eps * scale0 are cancellation dust
        self.scale0 = max(bangle.max_abs(), 1.0)

    @property
    def rank_floor(self):
        if self.field.is_exact:
            return 0.0
        return self.field.eps * self.scale0

    def to_bangle(self):
        return Bangle(self.field, [s.copy() for s in self.strips], self.boxed)

    def witness(self):
        return Witness(self.mode, self.partition, self.boxed, self.acc.copy(),
                       check=False)

    def overwrite(self, bangle):
        self.strips = [s.copy() for s in bangle.strips]

    # -- elementary moves -------------------------------------------------

    def col_op(self, i, t_mat):
        """Columns of an unboxed strip transformed by t_mat.  Boxed-strip
        columns are only ever moved through row_and_box, which keeps the
        paired row change in sync."""
        if i == self.boxed:
            raise InvariantViolation("boxed-strip columns require row_and_box")
        if t_mat.shape != (self.partition[i], self.partition[i]):
            raise ShapeMismatch("col_op transform shape mismatch")
        self.strips[i] = self.strips[i] @ t_mat
        self._acc_right_mul(i, t_mat)

    def col_add(self, i, j, c_mat):
        """Columns of strip i, combined by c_mat, added into strip j (i < j)."""
        if not i < j:
            raise InvariantViolation("col_add must go left to right")
        if c_mat.shape != (self.partition[i], self.partition[j]):
            raise ShapeMismatch("col_add coefficient shape mismatch")
        if self.partition[i] == 0 or self.partition[j] == 0:
            return
        self.strips[j] = self.strips[j].add(self.strips[i] @ c_mat)
        self._acc_right_addmul(i, j, c_mat)

    def row_and_box(self, e_mat):
        """Rows of everything by e_mat, boxed strip also hit from the right
        by e_mat^* (star) or e_mat^{-1} (sim)."""
        if e_mat.shape != (self.n, self.n):
            raise ShapeMismatch("row transform shape mismatch")
        right = e_mat.conj_transpose() if self.mode == STAR else e_mat.inverse()
        for idx in range(len(self.strips)):
            if self.partition[idx] == 0:
                continue
            self.strips[idx] = e_mat @ self.strips[idx]
        if self.partition[self.boxed]:
            self.strips[self.boxed] = self.strips[self.boxed] @ right
        self._acc_right_mul(self.boxed, right)

    # -- witness accumulation (column-targeted, avoids full products) -----

    def _acc_right_mul(self, i, t_mat):
        c0, c1 = self.offs[i], self.offs[i + 1]
        if c1 == c0:
            return
        f = self.field
        z = f.zero()
        eq, add, mul = f.eq, f.add, f.mul
        data = self.acc.data
        w = c1 - c0
        for row in data:
            seg = row[c0:c1]
            new = [z] * w
            for a in range(w):
                x = seg[a]
                if eq(x, z):
                    continue
                ta = t_mat.data[a]
                for b in range(w):
                    y = ta[b]
                    if not eq(y, z):
                        new[b] = add(new[b], mul(x, y))
            row[c0:c1] = new

    def _acc_right_addmul(self, i, j, c_mat):
        ci0, ci1 = self.offs[i], self.offs[i + 1]
        cj0 = self.offs[j]
        f = self.field
        z = f.zero()
        eq, add, mul = f.eq, f.add, f.mul
        for row in self.acc.data:
            for a in range(ci1 - ci0):
                x = row[ci0 + a]
                if eq(x, z):
                    continue
                ca = c_mat.data[a]
                for b in range(len(ca)):
                    y = ca[b]
                    if not eq(y, z):
                        row[cj0 + b] = add(row[cj0 + b], mul(x, y))


def _embed_rows(field, n, r0, block):
    """Identity n x n with `block` placed at rows/cols [r0, r0+size)."""
    e = Mat.identity(field, n)
    for a in range(block.rows):
        for b in range(block.cols):
            e.data[r0 + a][r0 + b] = block.data[a][b]
    return e


# ---------------------------------------------------------------------------
# reduction steps
# ---------------------------------------------------------------------------

@dataclass
class ReductionStep:
    kind: str
    ranks: tuple
    inner: Bangle
    layout: Layout
    witness: Witness

    def rebuild(self, inner=None):
        return self.layout.embed(self.inner if inner is None else inner)


def _staircase(ws, strip_indices, region, direction, clear_up_to):
    """Column staircase over the given strips inside a row region.

    region = (lo, hi) active rows; direction "bottom" freezes at the region's
    bottom and shrinks hi, "top" freezes at the top and grows lo.  After each
    strip is frozen, every strip to its right (up to clear_up_to, exclusive)
    is cleared on the frozen rows by column additions from the new identity.
    Returns the per-strip ranks in processing order.
    """
    f = ws.field
    lo, hi = region
    ranks = []
    corner = "br" if direction == "bottom" else "tr"
    for i in strip_indices:
        w = ws.partition[i]
        blk = ws.strips[i].block(lo, hi, 0, w)
        rr = column_echelon_in_strip(blk, corner=corner, floor=ws.rank_floor)
        c = rr.rank
        ranks.append(c)
        if w:
            e_full = _embed_rows(f, ws.n, lo, rr.left)
            ws.col_op(i, rr.right)
            ws.row_and_box(e_full)
            if not f.is_exact and c:
                # normalize the nonsingular pivot block H to an identity
                fr0 = (hi - c) if direction == "bottom" else lo
                h = ws.strips[i].block(fr0, fr0 + c, w - c, w)
                t_fix = Mat.identity(f, w)
                hinv = h.inverse()
                for a in range(c):
                    for b in range(c):
                        t_fix.data[w - c + a][w - c + b] = hinv.data[a][b]
                ws.col_op(i, t_fix)
            if not f.is_exact:
                _snap_strip_region(ws, i, lo, hi, c, direction)
        if direction == "bottom":
            fr0, fr1 = hi - c, hi
            hi -= c
        else:
            fr0, fr1 = lo, lo + c
            lo += c
        if c:
            _clear_frozen_rows(ws, i, fr0, fr1, clear_up_to)
    return ranks, (lo, hi)


def _snap_strip_region(ws, i, lo, hi, c, direction):
    """Idealize a freshly echeloned strip region to exact zeros / ones."""
    f = ws.field
    w = ws.partition[i]
    s = ws.strips[i]
    for r in range(lo, hi):
        for jcol in range(w):
            s.data[r][jcol] = f.zero()
    base = (hi - c) if direction == "bottom" else lo
    for a in range(c):
        s.data[base + a][w - c + a] = f.one()


def _clear_frozen_rows(ws, i, fr0, fr1, clear_up_to):
    """Zero the content of strips right of i on rows [fr0, fr1) by adding
    columns of strip i's fresh identity block."""
    f = ws.field
    w = ws.partition[i]
    c = fr1 - fr0
    id_col0 = w - c
    for l in range(i + 1, clear_up_to):
        wl = ws.partition[l]
        if wl == 0:
            continue
        content = ws.strips[l].block(fr0, fr1, 0, wl)
        if content.is_zero(scale=max(ws_scale(ws), 1.0) if not f.is_exact else None):
            if not f.is_exact:
                _zero_rows(ws.strips[l], fr0, fr1)
            continue
        coeff = Mat.zeros(f, w, wl)
        for a in range(c):
            for b in range(wl):
                coeff.data[id_col0 + a][b] = f.neg(content.data[a][b])
        ws.col_add(i, l, coeff)
        if not f.is_exact:
            _zero_rows(ws.strips[l], fr0, fr1)


def _zero_rows(strip, r0, r1):
    z = strip.field.zero()
    for r in range(r0, r1):
        for c in range(strip.cols):
            strip.data[r][c] = z


def ws_scale(ws):
    return max((s.max_abs() for s in ws.strips), default=0.0)


def left_reduce(bangle, mode):
    """Compress the strips left of the box; the inner bangle keeps all its
    content in one horizontal block (top for star, bottom for sim)."""
    k0 = bangle.boxed
    t = bangle.t
    if k0 == 0:
        return ReductionStep(TRIVIAL, (), bangle, trivial_layout(bangle, mode),
                             Witness.identity(bangle.field, mode, bangle.widths, 0))
    ws = Workspace(bangle, mode)
    direction = "bottom" if mode == STAR else "top"
    ranks, (lo, hi) = _staircase(ws, list(range(k0)), (0, ws.n), direction, t)
    m = hi - lo
    if mode == STAR:
        layout = layout_left_star(bangle.widths, k0, tuple(ranks), m)
        kind = LEFT_STAR
    else:
        layout = layout_left_sim(bangle.widths, k0, tuple(ranks), m)
        kind = LEFT_SIM
    inner = layout.extract_inner(ws.to_bangle())
    ordered_ranks = tuple(reversed(ranks)) if mode == STAR else tuple(ranks)
    step = ReductionStep(kind, ordered_ranks, inner, layout, ws.witness())
    _check_step(step, bangle)
    return step


def right_reduce(bangle, mode):
    """Row-compress a box-first bangle and staircase what remains of the
    unboxed strips; the box of the inner bangle moves last (star) or stays
    first (sim) and one strip is added."""
    if bangle.boxed != 0:
        raise InvariantViolation("right reduction needs the box first")
    t = bangle.t
    f = bangle.field
    ws = Workspace(bangle, mode)
    n0 = bangle.widths[0]
    zeros_at = "top" if mode == STAR else "bottom"
    r, e = row_compress(ws.strips[0], zeros_at=zeros_at, floor=ws.rank_floor)
    if n0:
        ws.row_and_box(e)
    d = ws.n - r
    if mode == STAR:
        m_rows = (d, ws.n)        # independent rows at the bottom
        dead_region = (0, d)
    else:
        m_rows = (0, r)
        dead_region = (r, ws.n)
    if not f.is_exact:
        _zero_rows(ws.strips[0], *dead_region)
    # clear the independent rows of every unboxed strip using the box columns
    bm = ws.strips[0].block(m_rows[0], m_rows[1], 0, n0)
    for l in range(1, t):
        wl = ws.partition[l]
        if wl == 0 or r == 0:
            continue
        content = ws.strips[l].block(m_rows[0], m_rows[1], 0, wl)
        if content.is_zero(scale=max(ws_scale(ws), 1.0) if not f.is_exact else None):
            if not f.is_exact:
                _zero_rows_range(ws.strips[l], m_rows)
            continue
        x = solve_right(bm, content.neg())
        ws.col_add(0, l, x)
        if not f.is_exact:
            _zero_rows_range(ws.strips[l], m_rows)
    # staircase over the remaining rows of the unboxed strips
    direction = "bottom" if mode == STAR else "top"
    ranks, (lo, hi) = _staircase(ws, list(range(1, t)), dead_region, direction, t)
    leftover = hi - lo
    if mode == STAR:
        layout = layout_right_star(bangle.widths, tuple(ranks), leftover, r)
        kind = RIGHT_STAR
        ordered_ranks = (leftover,) + tuple(reversed(ranks))
    else:
        layout = layout_right_sim(bangle.widths, tuple(ranks), leftover, r)
        kind = RIGHT_SIM
        ordered_ranks = tuple(ranks) + (leftover,)
    inner = layout.extract_inner(ws.to_bangle())
    step = ReductionStep(kind, ordered_ranks, inner, layout, ws.witness())
    _check_step(step, bangle)
    return step


def _zero_rows_range(strip, rows):
    _zero_rows(strip, rows[0], rows[1])


def _check_step(step, original):
    """rebuild(embedding, inner) must equal apply(witness, input)."""
    f = original.field
    rebuilt = step.layout.embed(step.inner, f)
    applied = step.witness.apply(original)
    if f.is_exact:
        if rebuilt != applied:
            raise InvariantViolation(f"{step.kind}: witness does not certify the layout")
    else:
        tol = 1000 * f.eps * max(applied.max_abs(), 1.0)
        if not rebuilt.close_to(applied, tol):
            raise InvariantViolation(f"{step.kind}: witness drifted beyond tolerance")


# public, mode-fixed entry points ------------------------------------------

def left_reduce_star(bangle):
    return left_reduce(bangle, STAR)


def right_reduce_star(bangle):
    return right_reduce(bangle, STAR)


def left_reduce_sim(bangle):
    return left_reduce(bangle, SIM)


def right_reduce_sim(bangle):
    return right_reduce(bangle, SIM)


# ---------------------------------------------------------------------------
# witness factorization and lifting
# ---------------------------------------------------------------------------

def factor_witness(w):
    """Split an upper block-triangular witness into diagonal strip operations
    and single-block column additions whose ordered product is w.mat."""
    f = w.mat.field
    part = w.partition
    tau = len(part)
    elems = []
    inv_diag = {}
    for a in range(tau):
        if part[a] == 0:
            continue
        d = w.block(a, a)
        if d != Mat.identity(f, part[a]):
            elems.append(("diag", a, d))
        inv_diag[a] = d.inverse()
    # unipotent remainder: row block a of u is D_a^{-1} times that of w.mat
    u = w.mat.copy()
    offs = _offsets(part)
    for a in range(tau):
        if part[a] == 0 or a not in inv_diag:
            continue
        r0, r1 = offs[a], offs[a + 1]
        blockrows = Mat(f, part[a], u.cols, [u.data[i] for i in range(r0, r1)])
        newrows = inv_diag[a] @ blockrows
        for i in range(r0, r1):
            u.data[i] = newrows.data[i - r0]
    # peel columns left to right
    for b in range(1, tau):
        if part[b] == 0:
            continue
        c0, c1 = offs[b], offs[b + 1]
        col_elems = []
        for a in range(b):
            if part[a] == 0:
                continue
            k_ab = u.block(offs[a], offs[a + 1], c0, c1)
            if k_ab.is_zero(scale=None if f.is_exact else max(u.max_abs(), 1.0)):
                continue
            col_elems.append((a, k_ab))
        for a, k_ab in col_elems:
            elems.append(("coladd", a, b, k_ab))
            # clear: rows of block a -= k_ab @ rows of block b
            r0, r1 = offs[a], offs[a + 1]
            br0, br1 = offs[b], offs[b + 1]
            rows_b = Mat(f, part[b], u.cols, [u.data[i] for i in range(br0, br1)])
            delta = k_ab @ rows_b
            for i in range(r0, r1):
                u.data[i] = [f.sub(x, y) for x, y in zip(u.data[i], delta.data[i - r0])]
    return elems


def _apply_elem_to_bangle(bangle, elem, mode):
    f = bangle.field
    strips = list(bangle.strips)
    if elem[0] == "diag":
        _, a, d = elem
        strips[a] = strips[a] @ d
        if a == bangle.boxed:
            left = d.conj_transpose() if mode == STAR else d.inverse()
            strips = [left @ s if s.cols else s for s in strips]
    else:
        _, a, b, k = elem
        if strips[a].cols and strips[b].cols:
            strips[b] = strips[b].add(strips[a] @ k)
    return Bangle(f, strips, bangle.boxed)


def _translate_elem(layout, elem, ws):
    """Perform the outer operations realizing one inner elementary move."""
    f = ws.field
    mode = layout.mode
    ro = layout.row_offsets
    if elem[0] == "diag":
        _, a, d = elem
        loc = layout.strip_loc[a]
        if loc[0] == "strip":
            ws.col_op(loc[1], d)
            return
        cb = loc[1]
        block = d.conj_transpose() if mode == STAR else d.inverse()
        e = _embed_rows(f, ws.n, ro[cb], block)
        ws.row_and_box(e)
        if cb in layout.frames and cb != layout.m_block:
            fs, c0 = layout.frames[cb]
            sz = layout.row_blocks[cb]
            spoiled = ws.strips[fs].block(ro[cb], ro[cb] + sz, c0, c0 + sz)
            t_fix = Mat.identity(f, ws.partition[fs])
            fix = spoiled.inverse()
            for x in range(sz):
                for y in range(sz):
                    t_fix.data[c0 + x][c0 + y] = fix.data[x][y]
            ws.col_op(fs, t_fix)
        return
    _, a, b, k = elem
    loc_a, loc_b = layout.strip_loc[a], layout.strip_loc[b]
    if loc_a[0] == "strip" and loc_b[0] == "strip":
        ws.col_add(loc_a[1], loc_b[1], k)
        return
    if loc_a[0] == "box" and loc_b[0] == "strip":
        ca = loc_a[1]
        cmat = Mat.zeros(f, ws.partition[layout.outer_boxed], ws.partition[loc_b[1]])
        for x in range(k.rows):
            for y in range(k.cols):
                cmat.data[ro[ca] + x][y] = k.data[x][y]
        ws.col_add(layout.outer_boxed, loc_b[1], cmat)
        return
    if loc_a[0] == "strip":
        raise InvariantViolation("inner strips may not feed box substrips")
    ca, cb = loc_a[1], loc_b[1]
    e = Mat.identity(f, ws.n)
    if mode == STAR:
        kc = k.conj_transpose()
        for x in range(kc.rows):          # row block cb += k^* . row block ca
            for y in range(kc.cols):
                e.data[ro[cb] + x][ro[ca] + y] = kc.data[x][y]
    else:
        for x in range(k.rows):           # row block ca -= k . row block cb
            for y in range(k.cols):
                e.data[ro[ca] + x][ro[cb] + y] = f.neg(k.data[x][y])
    ws.row_and_box(e)


def _repair_to(layout, ws, target):
    """Cancel the frame junk left by a row operation, using column additions
    from staircase identities (or from the box when the junk sits in the
    inner rows and the box rows are independent)."""
    f = ws.field
    ro = layout.row_offsets
    # snap is fed to Mat.is_zero as a scale, so the threshold is eps*snap
    snap = None if f.is_exact else 50 * max(target.max_abs(), ws_scale(ws), 1.0)
    for s in range(len(layout.outer_widths)):
        w = layout.outer_widths[s]
        if w == 0:
            continue
        diff = target.strips[s].sub(ws.strips[s])
        if diff.is_zero(scale=snap):
            continue
        for rb in range(len(layout.row_blocks)):
            h = layout.row_blocks[rb]
            if h == 0:
                continue
            block = diff.block(ro[rb], ro[rb] + h, 0, w)
            if block.is_zero(scale=snap):
                continue
            if rb == layout.m_block:
                if not (layout.box_solves_m_rows and layout.outer_boxed < s):
                    raise InvariantViolation("unrepairable junk in the inner rows")
                m0, m1 = layout.rows_of(layout.m_block)
                bm = ws.strips[layout.outer_boxed].block(m0, m1, 0,
                                                         layout.outer_widths[layout.outer_boxed])
                x = solve_right(bm, block)
                ws.col_add(layout.outer_boxed, s, x)
            else:
                if rb not in layout.frames:
                    raise InvariantViolation("junk in rows without a staircase identity")
                fs, c0 = layout.frames[rb]
                if not fs < s:
                    raise InvariantViolation("repair source is not left of the target")
                cmat = Mat.zeros(f, ws.partition[fs], w)
                for x in range(h):
                    for y in range(w):
                        cmat.data[c0 + x][y] = block.data[x][y]
                ws.col_add(fs, s, cmat)
