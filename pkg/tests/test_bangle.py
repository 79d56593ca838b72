import random

import pytest

from bangles.bangle import (Bangle, ColCombAdd, ColsInStrip, RowAndBox, SIM,
                            STAR, SingularSummand, Witness,
                            admissible_permute, apply_transformation,
                            block_direct_sum, compose_transformations, delta,
                            e_col, gamma, jordan, permutation_witness,
                            regular_bangle, summand_bangle, E_IN_STRIP, PLAIN)
from bangles.canonical import cosquare, invariant_factors
from bangles.errors import (InvariantViolation, LayoutMismatch,
                            SingularRegularPart)
from bangles.fields import ScalarField
from bangles.matrix import Mat
from bangles.regularize import regularize
from bangles.sampling import (random_bangle, random_bangle_shape, random_mat,
                              random_nonsingular, random_witness)

Q = ScalarField.rational()
QI = ScalarField.gaussian()
GF2 = ScalarField.gf(2)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def test_gamma_delta_base_case():
    assert gamma(Q, 1) == Mat.from_int_rows(Q, [[1]])
    assert delta(QI, 1) == Mat.from_rows(QI, [[QI.one()]])


def test_gamma_hand_expanded():
    assert gamma(Q, 2) == Mat.from_int_rows(Q, [[0, -1], [1, 1]])
    assert gamma(Q, 3) == Mat.from_int_rows(Q, [[0, 0, 1], [0, -1, -1], [1, 1, 0]])


def test_gamma_cosquare_single_eigenvalue():
    # the cosquare of gamma(n) has the single eigenvalue (-1)^(n+1) with
    # multiplicity n: its characteristic polynomial is (x -+ 1)^n
    for n in range(1, 5):
        cs = cosquare(gamma(QI, n))
        facs = invariant_factors(cs)
        assert len(facs) == 1
        sign = 1 if n % 2 == 1 else -1
        # (x - sign)^n coefficients via binomial expansion
        from math import comb
        want = [QI.from_int(comb(n, k) * ((-sign) ** (n - k))) for k in range(n + 1)]
        assert list(facs[0]) == want


def test_delta_pattern():
    d = delta(QI, 3)
    i = QI.imag_unit()
    assert d == Mat.from_rows(QI, [
        [QI.zero(), QI.zero(), QI.one()],
        [QI.zero(), QI.one(), i],
        [QI.one(), i, QI.zero()]])


def test_delta_needs_imaginary_unit():
    with pytest.raises(ValueError):
        delta(Q, 2)


def test_jordan_block():
    assert jordan(Q, 2, Q.zero()) == Mat.from_int_rows(Q, [[0, 1], [0, 0]])


def test_e_col():
    assert e_col(Q, 0).shape == (0, 1)
    assert e_col(Q, 3) == Mat.from_int_rows(Q, [[0], [0], [1]])


# ---------------------------------------------------------------------------
# direct sums and summand bangles
# ---------------------------------------------------------------------------

def test_block_direct_sum_identity_element():
    a = random_bangle(random.Random(0), Q, 3, 1, (2, 2, 1))
    empty = Bangle(Q, [Mat.zeros(Q, 0, 0)] * 3, 1)
    assert block_direct_sum(a, empty) == a


def test_block_direct_sum_of_nilpotent_units():
    one = Bangle(Q, [Mat.zeros(Q, 1, 1)], 0)      # J_1(0) boxed
    two = block_direct_sum(one, one)
    assert two.box == Mat.zeros(Q, 2, 2)


def test_block_direct_sum_with_e_columns():
    s = SingularSummand(E_IN_STRIP, 1, 1)
    a = summand_bangle(Q, s, 2, 0)
    ab = block_direct_sum(a, a)
    assert ab.strips[1] == Mat.identity(Q, 2)
    dec = regularize(ab, STAR)
    assert dec.summand_multiset() == (s, s)


def test_block_direct_sum_layout_mismatch():
    a = Bangle(Q, [Mat.zeros(Q, 1, 1), Mat.zeros(Q, 1, 0)], 0)
    b = Bangle(Q, [Mat.zeros(Q, 1, 0), Mat.zeros(Q, 1, 1)], 1)
    with pytest.raises(LayoutMismatch):
        block_direct_sum(a, b)


def test_regular_bangle_and_summands():
    r = regular_bangle(Q, Mat.from_int_rows(Q, [[2]]), 2, 0)
    assert r.widths == (1, 0)
    with pytest.raises(SingularRegularPart):
        regular_bangle(Q, Mat.zeros(Q, 1, 1), 2, 0)
    p = summand_bangle(Q, SingularSummand(PLAIN, 1), 3, 1)
    assert p.widths == (0, 1, 0) and p.box == Mat.zeros(Q, 1, 1)
    e0 = summand_bangle(Q, SingularSummand(E_IN_STRIP, 0, 1), 2, 0)
    assert e0.n_rows == 0 and e0.widths == (0, 1)


def test_summand_round_trip_detection():
    # detect(summand_bangle(s)) == {s} for q <= 5 and every layout t <= 4
    for t in range(1, 5):
        for k0 in range(t):
            cases = [SingularSummand(PLAIN, q) for q in range(1, 6)]
            for i in range(t):
                if i == k0:
                    continue
                cases.extend(SingularSummand(E_IN_STRIP, q, i) for q in range(6))
            for s in cases:
                b = summand_bangle(Q, s, t, k0)
                for mode in (STAR, SIM):
                    dec = regularize(b, mode)
                    assert dec.regular.rows == 0
                    assert dec.summand_multiset() == (s,)


# ---------------------------------------------------------------------------
# transformations and witnesses
# ---------------------------------------------------------------------------

def test_identity_witness_is_neutral():
    a = random_bangle(random.Random(1), Q, 3, 1, (2, 2, 1))
    w = Witness.identity(Q, STAR, a.widths, a.boxed)
    assert w.apply(a) == a


def test_one_by_one_congruence_and_similarity():
    a = Bangle(Q, [Mat.from_int_rows(Q, [[1]])], 0)
    e = Mat.from_int_rows(Q, [[2]])
    assert apply_transformation(RowAndBox(e, STAR), a, STAR).box == \
        Mat.from_int_rows(Q, [[4]])
    b = Bangle(Q, [Mat.from_int_rows(Q, [[3]])], 0)
    assert apply_transformation(RowAndBox(e, SIM), b, SIM).box == \
        Mat.from_int_rows(Q, [[3]])


def test_composition_matches_sequential_application():
    rng = random.Random(2)
    for trial in range(40):
        f = (Q, QI, GF2)[trial % 3]
        mode = STAR if trial % 2 else SIM
        t, k0, widths = random_bangle_shape(rng, t_max=3, box_max=3, total_max=8)
        a = random_bangle(rng, f, t, k0, widths, span=2)
        trs = []
        for _ in range(rng.randint(1, 4)):
            kind = rng.randrange(3)
            if kind == 0:
                trs.append(RowAndBox(random_nonsingular(rng, f, widths[k0]), mode))
            elif kind == 1:
                i = rng.randrange(t)
                if i == k0:
                    continue
                trs.append(ColsInStrip(i, random_nonsingular(rng, f, widths[i])))
            else:
                i = rng.randrange(t)
                j = rng.randrange(t)
                if i >= j:
                    continue
                trs.append(ColCombAdd(i, j, random_mat(rng, f, widths[i], widths[j])))
        if not trs:
            continue
        seq = a
        for tr in trs:
            seq = apply_transformation(tr, seq, mode)
        w = compose_transformations(trs, f, a.widths, a.boxed, mode)
        assert w.apply(a) == seq


def test_boxed_strips_of_congruent_bangles_are_congruent():
    # B_k = S_kk^* A_k S_kk holds verbatim when nothing feeds the boxed
    # strip's columns from the left: box-first bangles with any witness, and
    # arbitrary box position with a block-diagonal witness.  (With a later
    # box, transformation (c) may add earlier strips into the box, which is
    # the whole point of regularization.)
    rng = random.Random(3)
    for trial in range(30):
        f = Q if trial % 2 else QI
        t, k0, widths = random_bangle_shape(rng, t_max=3, box_max=3, total_max=8)
        a = random_bangle(rng, f, t, k0, widths, span=2)
        w = random_witness(rng, f, STAR, widths, k0)
        if k0 != 0:
            # zero the off-diagonal blocks so nothing enters the box columns
            m = w.mat.copy()
            offs = [0]
            for width in widths:
                offs.append(offs[-1] + width)
            for i in range(t):
                for j in range(i + 1, t):
                    for r in range(offs[i], offs[i + 1]):
                        for c in range(offs[j], offs[j + 1]):
                            m.data[r][c] = f.zero()
            w = Witness(STAR, widths, k0, m)
        b = w.apply(a)
        skk = w.block(k0, k0)
        assert skk.conj_transpose() @ a.box @ skk == b.box


def test_admissible_permutation_group_property():
    rng = random.Random(4)
    a = random_bangle(rng, Q, 2, 0, (3, 2))
    perm = [2, 0, 1]
    cols = {1: [1, 0]}
    b, w = admissible_permute(a, perm, cols)
    inv_perm = [perm.index(i) for i in range(3)]
    inv_cols = {1: [cols[1].index(i) for i in range(2)]}
    c, _ = admissible_permute(b, inv_perm, inv_cols)
    assert c == a
    # permutation witnesses have permutation diagonal blocks, zero elsewhere
    assert w.block(0, 1).is_zero()
    for i in range(2):
        blk = w.block(i, i)
        for row in blk.data:
            assert sum(1 for x in row if not Q.eq(x, Q.zero())) == 1


def test_admissible_permutation_implies_both_equivalences():
    rng = random.Random(5)
    a = random_bangle(rng, QI, 2, 1, (2, 2))
    perm = [1, 0]
    for mode in (STAR, SIM):
        w = permutation_witness(QI, mode, a.widths, a.boxed, perm, {0: [1, 0]})
        b = w.apply(a)
        dec_a = regularize(a, mode)
        dec_b = regularize(b, mode)
        assert dec_a.summand_multiset() == dec_b.summand_multiset()


def test_witness_rejects_lower_triangular():
    m = Mat.from_int_rows(Q, [[1, 0], [1, 1]])
    with pytest.raises(InvariantViolation):
        Witness(STAR, (1, 1), 0, m)


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

from hypothesis import given, settings
from hypothesis import strategies as st


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 1),
       st.randoms(use_true_random=False))
def test_direct_sum_then_decompose_matches_parts(nk, no, k0_bit, hyp_rng):
    k0 = k0_bit % 2
    widths = (nk, no) if k0 == 0 else (no, nk)
    rng = random.Random(hyp_rng.randint(0, 10 ** 9))
    a = random_bangle(rng, GF2, 2, k0, widths)
    b = random_bangle(rng, GF2, 2, k0, widths)
    ab = block_direct_sum(a, b)
    da = regularize(a, STAR)
    db = regularize(b, STAR)
    dab = regularize(ab, STAR)
    assert dab.summand_multiset() == tuple(
        sorted(da.summand_multiset() + db.summand_multiset()))
    assert dab.regular.rows == da.regular.rows + db.regular.rows


def test_witness_rejects_singular_diagonal_block():
    from bangles.errors import SingularBlock
    m = Mat.from_int_rows(Q, [[0, 1], [0, 1]])
    with pytest.raises(SingularBlock):
        Witness(STAR, (1, 1), 0, m)


def test_apply_dispatcher_handles_both_kinds():
    from bangles import apply
    a = Bangle(Q, [Mat.from_int_rows(Q, [[1]])], 0)
    w = Witness.identity(Q, STAR, a.widths, a.boxed)
    assert apply(w, a) == a
    tr = RowAndBox(Mat.from_int_rows(Q, [[2]]), STAR)
    assert apply(tr, a).box == Mat.from_int_rows(Q, [[4]])
