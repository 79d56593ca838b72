"""Full regularization: alternated reductions, replay, and the final sort.

The driver alternates left- and right-hand reductions until the inner bangle
is a nonsingular box with no other columns, then replays the whole chain on
the original bangle by lifting witnesses outward through each layout.  The
replayed matrix splits, by admissible permutations, into a regular part K
and a 0/1 bangle whose rows and columns carry at most one 1 each; sorting
that pattern yields the singular summand multiset.
"""

from dataclasses import dataclass

from .bangle import (SIM, STAR, SingularSummand, Witness,
                     assemble_decomposition, permutation_witness,
                     E_IN_STRIP, PLAIN)
from .errors import InvariantViolation, NonConvergence, NotZeroOne
from .matrix import Mat, is_nonsingular, numeric_rank
from .reduction import (Layout, ReductionStep, left_reduce, right_reduce)

REINDEX = "reindex"


def _is_terminal(bangle):
    """Nonsingular box, every other strip of width zero."""
    if any(w for i, w in enumerate(bangle.widths) if i != bangle.boxed):
        return False
    box = bangle.box
    if bangle.field.is_exact:
        return is_nonsingular(box)
    floor = bangle.field.eps * max(bangle.max_abs(), 1.0)
    return numeric_rank(box, floor=floor) == box.rows


def _reindex_layout(bangle, mode):
    """Drop the zero-width strips left of the box (sim phase handoff)."""
    k0 = bangle.boxed
    inner_widths = bangle.widths[k0:]
    strip_loc = tuple(("strip", k0 + a) for a in range(len(inner_widths)))
    return Layout(REINDEX, mode, bangle.widths, k0, (bangle.n_rows,), 0,
                  inner_widths, 0, strip_loc)


def _reindex_step(bangle, mode):
    layout = _reindex_layout(bangle, mode)
    inner = layout.extract_inner(bangle)
    return ReductionStep(REINDEX, (), inner, layout,
                         Witness.identity(bangle.field, mode, bangle.widths,
                                          bangle.boxed))


def _lift_through(step, w_inner):
    if step.kind == REINDEX:
        return Witness(w_inner.mode, step.layout.outer_widths,
                       step.layout.outer_boxed, w_inner.mat, check=False)
    return step.layout.lift(w_inner, step.inner)


def _build_chain(bangle, mode):
    chain = []
    cur = bangle
    guard = 2 * (bangle.total_cols + bangle.t) + 8
    if mode == STAR:
        while not _is_terminal(cur):
            if len(chain) > guard:
                raise NonConvergence("star alternation did not settle",
                                     eps=bangle.field.eps)
            if cur.boxed != 0:
                step = left_reduce(cur, STAR)
                chain.append(step)
                cur = step.inner
                if _is_terminal(cur):
                    break
            step = right_reduce(cur, STAR)
            chain.append(step)
            cur = step.inner
        return chain, cur
    # similarity: all left reductions first, then all right reductions
    while cur.boxed != 0 and any(cur.widths[:cur.boxed]):
        if len(chain) > guard:
            raise NonConvergence("similarity left phase did not settle",
                                 eps=bangle.field.eps)
        step = left_reduce(cur, SIM)
        chain.append(step)
        cur = step.inner
    if cur.boxed != 0:
        step = _reindex_step(cur, SIM)
        chain.append(step)
        cur = step.inner
    while not _is_terminal(cur):
        if len(chain) > guard:
            raise NonConvergence("similarity right phase did not settle",
                                 eps=bangle.field.eps)
        step = right_reduce(cur, SIM)
        chain.append(step)
        cur = step.inner
    return chain, cur


def _replay(bangle, chain, terminal, mode):
    """Witness A -> sigma plus the replayed big bangle and row/col tags."""
    f = bangle.field
    w_cur = Witness.identity(f, mode, terminal.widths, terminal.boxed)
    sigma = terminal
    row_tags = [True] * terminal.n_rows
    col_tags = [[True] * w for w in terminal.widths]
    for step in reversed(chain):
        lifted = _lift_through(step, w_cur)
        w_cur = step.witness.then(lifted)
        sigma = step.layout.embed(sigma, f)
        row_tags = step.layout.embed_row_tags(row_tags)
        col_tags = step.layout.embed_col_tags(col_tags)
    return w_cur, sigma, row_tags, col_tags


# ---------------------------------------------------------------------------
# the 0/1 sort (constructive uniqueness step)
# ---------------------------------------------------------------------------

def _one_positions(strip, field, rows):
    """(row, col) of entries equal to 1 among the given rows; everything else
    there must be exactly zero."""
    ones = []
    one, zero = field.one(), field.zero()
    for i in rows:
        for j in range(strip.cols):
            v = strip.data[i][j]
            if field.eq(v, one):
                ones.append((i, j))
            elif not field.eq(v, zero):
                raise NotZeroOne(f"entry {field.format_scalar(v)} is neither 0 nor 1")
    return ones


def _chains_from_pattern(box_ones, index_set):
    """Decompose the box 1-pattern (a partial injection on the index set)
    into paths [v_1, ..., v_q] with ones at (v_i, v_{i+1})."""
    succ = {}
    pred = {}
    for i, j in box_ones:
        if i in succ or j in pred:
            raise NotZeroOne("a row or column of the boxed strip has two ones")
        succ[i] = j
        pred[j] = i
    chains = []
    seen = set()
    for v in sorted(index_set):
        if v in pred or v in seen:
            continue
        chain = [v]
        seen.add(v)
        while chain[-1] in succ:
            nxt = succ[chain[-1]]
            if nxt in seen:
                raise InvariantViolation("cycle in the singular box pattern")
            chain.append(nxt)
            seen.add(nxt)
        chains.append(chain)
    if len(seen) != len(index_set):
        raise InvariantViolation("cycle in the singular box pattern")
    return chains


def _collect_items(bangle, chains, sing_rows):
    """One item per singular summand: (summand, chain rows, consumed column).

    Chain items read their attachment off the last chain row; leftover zero
    columns of unboxed strips become E_0 items."""
    f = bangle.field
    one, zero = f.one(), f.zero()
    k0 = bangle.boxed
    items = []
    consumed = {s: set() for s in range(bangle.t) if s != k0}
    for chain in chains:
        q = len(chain)
        hit = None
        for s in range(bangle.t):
            if s == k0:
                continue
            strip = bangle.strips[s]
            for j in range(strip.cols):
                v = strip.data[chain[-1]][j]
                if f.eq(v, one):
                    if hit is not None:
                        raise NotZeroOne("a row carries two ones")
                    hit = (s, j)
                elif not f.eq(v, zero):
                    raise NotZeroOne("entry is neither 0 nor 1")
        for vrow in chain[:-1]:
            for s in range(bangle.t):
                if s == k0:
                    continue
                strip = bangle.strips[s]
                for j in range(strip.cols):
                    if not f.eq(strip.data[vrow][j], zero):
                        raise NotZeroOne("interior chain row carries a one")
        if hit is None:
            items.append((SingularSummand(PLAIN, q), chain, None))
        else:
            if hit[1] in consumed[hit[0]]:
                raise NotZeroOne("a column carries two ones")
            consumed[hit[0]].add(hit[1])
            items.append((SingularSummand(E_IN_STRIP, q, hit[0]), chain, hit))
    for s in sorted(consumed):
        # any unboxed column not consumed must be zero on the singular rows
        strip = bangle.strips[s]
        for j in range(strip.cols):
            if j in consumed[s]:
                continue
            for i in sing_rows:
                if not f.eq(strip.data[i][j], zero):
                    raise NotZeroOne("unconsumed column is not zero")
            items.append((SingularSummand(E_IN_STRIP, 0, s), [], (s, j)))
    return items


def _canonical_assignment(bangle, reg_rows, items):
    """Sort items canonically; build the admissible permutation sending the
    bangle onto regular-part-first block-direct-sum form."""
    order = sorted(range(len(items)), key=lambda i: (items[i][0].sort_key(), i))
    summands = tuple(items[i][0] for i in order)
    row_perm = [None] * bangle.n_rows
    pos = 0
    for r in reg_rows:
        row_perm[r] = pos
        pos += 1
    for i in order:
        for v in items[i][1]:
            row_perm[v] = pos
            pos += 1
    if pos != bangle.n_rows or any(v is None for v in row_perm):
        raise InvariantViolation("row assignment does not cover the bangle")
    col_perms = {}
    next_slot = {s: 0 for s in range(bangle.t) if s != bangle.boxed}
    for s in next_slot:
        col_perms[s] = [None] * bangle.widths[s]
    for i in order:
        hit = items[i][2]
        if hit is None:
            continue
        s, j = hit
        col_perms[s][j] = next_slot[s]
        next_slot[s] += 1
    for s, perm in col_perms.items():
        if any(v is None for v in perm):
            raise InvariantViolation("column assignment does not cover a strip")
    return summands, row_perm, col_perms


def sort_zero_one(bangle, mode=STAR):
    """Sort a 0/1 bangle (at most one 1 per row and per column of the whole
    matrix) into plain / E_q summands by admissible permutations.

    Returns (summands, (row_perm, col_perms), witness); applying the witness
    to the input yields exactly the assembled block-direct sum.
    """
    f = bangle.field
    rows = list(range(bangle.n_rows))
    box_ones = _one_positions(bangle.box, f, rows)
    chains = _chains_from_pattern(box_ones, set(rows))
    items = _collect_items(bangle, chains, rows)
    summands, row_perm, col_perms = _canonical_assignment(bangle, [], items)
    w = permutation_witness(f, mode, bangle.widths, bangle.boxed, row_perm,
                            col_perms)
    result = w.apply(bangle)
    expected = assemble_decomposition(f, Mat.zeros(f, 0, 0), summands,
                                      bangle.t, bangle.boxed)
    if f.is_exact and result != expected:
        raise InvariantViolation("zero-one sort failed to canonicalize")
    return summands, (row_perm, col_perms), w


# ---------------------------------------------------------------------------
# the decomposition object and the public drivers
# ---------------------------------------------------------------------------

@dataclass
class RegularizingDecomposition:
    mode: str
    t: int
    boxed: int
    regular: Mat                   # p x p nonsingular (possibly 0 x 0)
    singular: tuple                # SingularSummand, canonical order
    witness: Witness               # apply(witness, input) == reassemble()
    step_ranks: tuple              # ((kind, ranks), ...) in reduction order

    @property
    def field(self):
        return self.regular.field

    def reassemble(self):
        return assemble_decomposition(self.field, self.regular,
                                      self.singular, self.t, self.boxed)

    def summand_multiset(self):
        return tuple(sorted(self.singular))

    def verify(self, original, tol=None):
        applied = self.witness.apply(original)
        sigma = self.reassemble()
        if self.field.is_exact:
            return applied == sigma
        if tol is None:
            tol = 1e-8 * max(original.max_abs(), 1.0)
        return applied.close_to(sigma, tol)


def regularize(bangle, mode):
    """Regularizing decomposition with a certified witness."""
    f = bangle.field
    chain, terminal = _build_chain(bangle, mode)
    w_replay, sigma, row_tags, col_tags = _replay(bangle, chain, terminal, mode)
    k0 = bangle.boxed
    reg_rows = [i for i, tag in enumerate(row_tags) if tag]
    reg_cols = [j for j, tag in enumerate(col_tags[k0]) if tag]
    if reg_rows != reg_cols:
        raise InvariantViolation("regular rows and box columns disagree")
    kmat = sigma.box.take_rows(reg_rows).take_cols(reg_cols)
    sing_rows = [i for i in range(sigma.n_rows) if not row_tags[i]]
    _assert_clean_split(sigma, row_tags, col_tags)
    box_ones = _one_positions(sigma.box, f, sing_rows)
    chains = _chains_from_pattern(box_ones, set(sing_rows))
    items = _collect_items(sigma, chains, sing_rows)
    summands, row_perm, col_perms = _canonical_assignment(sigma, reg_rows, items)
    w_perm = permutation_witness(f, mode, sigma.widths, sigma.boxed,
                                 row_perm, col_perms)
    total = w_replay.then(w_perm)
    dec = RegularizingDecomposition(
        mode, bangle.t, k0, kmat, tuple(summands), total,
        tuple((st.kind, st.ranks) for st in chain))
    final = w_perm.apply(sigma)
    expected = dec.reassemble()
    if f.is_exact:
        if final != expected:
            raise InvariantViolation("decomposition reassembly mismatch")
    else:
        tol = 1000 * f.eps * max(final.max_abs(), 1.0)
        if not final.close_to(expected, tol):
            raise NonConvergence("reassembly drifted beyond tolerance", eps=f.eps)
    if not dec.verify(bangle):
        raise InvariantViolation("witness fails to certify the decomposition")
    return dec


def _assert_clean_split(sigma, row_tags, col_tags):
    """Regular rows must be zero outside the K block and singular rows zero
    on regular box columns; the embeds guarantee it, this guards bugs."""
    f = sigma.field
    zero = f.zero()
    k0 = sigma.boxed
    scale = None if f.is_exact else 50 * max(sigma.max_abs(), 1.0)
    for s in range(sigma.t):
        strip = sigma.strips[s]
        tags = col_tags[s]
        for i in range(sigma.n_rows):
            for j in range(strip.cols):
                if f.is_zero(strip.data[i][j], scale):
                    continue
                reg_cell = row_tags[i] and s == k0 and tags[j]
                sing_cell = (not row_tags[i]) and not (s == k0 and tags[j])
                if not (reg_cell or sing_cell):
                    raise InvariantViolation("regular/singular split is not clean")


def regularize_star(bangle):
    return regularize(bangle, STAR)


def regularize_sim(bangle):
    return regularize(bangle, SIM)
