import random

import numpy as np
import pytest

from bangles.bangle import jordan
from bangles.errors import ShapeMismatch, SingularMatrix
from bangles.fields import ScalarField
from bangles.matrix import (Mat, column_echelon_in_strip, exact_rank,
                            exact_rank_reveal, is_nonsingular, rank,
                            row_compress, solve_right, unitary_rank_reveal,
                            unitary_row_compress)
from bangles.sampling import random_mat

Q = ScalarField.rational()
QI = ScalarField.gaussian()
GF5 = ScalarField.gf(5)
C = ScalarField.complex_float()


def test_conj_transpose_definition():
    i = QI.imag_unit()
    m = Mat.from_rows(QI, [[QI.add(QI.one(), i), QI.from_int(2)],
                           [QI.zero(), QI.from_int(3)]])
    h = m.conj_transpose()
    assert QI.format_scalar(h.data[0][0]) == "1-i"
    assert h.data[0][1] == QI.zero()
    assert h.conj_transpose() == m


def test_conj_transpose_empty_conventions():
    m = Mat.zeros(Q, 3, 0)
    assert m.conj_transpose().shape == (0, 3)


def test_identity_involution_transpose_only():
    m = Mat.from_int_rows(Q, [[1, 2], [3, 4]])
    assert m.conj_transpose() == m.transpose()


def test_empty_product_is_zero():
    assert (Mat.zeros(Q, 2, 0) @ Mat.zeros(Q, 0, 3)) == Mat.zeros(Q, 2, 3)


def test_direct_sum_of_empty_blocks():
    # 0_{p0} (+) 0_{0q} = 0_{pq}
    assert Mat.zeros(Q, 2, 0).direct_sum(Mat.zeros(Q, 0, 3)) == Mat.zeros(Q, 2, 3)


def test_jordan_inverse_exact():
    j = jordan(Q, 2, Q.from_int(3))
    jinv = j.inverse()
    assert jinv == Mat.from_rows(Q, [[Q.parse_scalar("1/3"), Q.parse_scalar("-1/9")],
                                     [Q.zero(), Q.parse_scalar("1/3")]])
    assert j @ jinv == Mat.identity(Q, 2)


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrix):
        Mat.from_int_rows(Q, [[1, 2], [2, 4]]).inverse()


def test_shape_mismatch_raises():
    with pytest.raises(ShapeMismatch):
        Mat.zeros(Q, 2, 3) @ Mat.zeros(Q, 2, 3)


def test_echelon_rank_zero_matrix():
    rr = column_echelon_in_strip(Mat.zeros(Q, 2, 2))
    assert rr.rank == 0
    assert rr.left == Mat.identity(Q, 2)
    assert rr.right == Mat.identity(Q, 2)


def test_echelon_rank_one_by_minors():
    # all 2x2 minors of [[1,2],[2,4]] vanish, a 1x1 minor does not
    m = Mat.from_int_rows(Q, [[1, 2], [2, 4]])
    rr = column_echelon_in_strip(m)
    assert rr.rank == 1
    assert (rr.left @ m @ rr.right) == Mat.from_int_rows(Q, [[0, 0], [0, 1]])


def test_echelon_empty_matrix():
    rr = column_echelon_in_strip(Mat.zeros(Q, 0, 4))
    assert rr.rank == 0


def test_exact_rank_reveal_shapes():
    rng = random.Random(5)
    for field in (Q, QI, GF5):
        for _ in range(60):
            m = random_mat(rng, field, rng.randint(0, 4), rng.randint(0, 4), span=2)
            for corner in ("br", "tr"):
                r, e, t = exact_rank_reveal(m, corner)
                res = e @ m @ t
                expect = Mat.zeros(field, m.rows, m.cols)
                base_r = m.rows - r if corner == "br" else 0
                for a in range(r):
                    expect.data[base_r + a][m.cols - r + a] = field.one()
                assert res == expect
                assert is_nonsingular(e) and is_nonsingular(t)


def test_row_compress_exact():
    rng = random.Random(6)
    for _ in range(40):
        m = random_mat(rng, Q, rng.randint(0, 4), rng.randint(0, 4), span=2)
        r, e = row_compress(m, zeros_at="top")
        res = e @ m
        assert all(Q.eq(x, Q.zero()) for row in res.data[:m.rows - r] for x in row)
        assert exact_rank(res.block(m.rows - r, m.rows, 0, m.cols)) == r


def test_unitary_rank_reveal_identity():
    rr = unitary_rank_reveal(Mat.from_numpy(C, np.eye(3)))
    assert rr.rank == 3 and rr.mode == "unitary"


def test_unitary_rank_tolerance():
    # sigma_2 / sigma_1 ~ 5e-16 < eps = 1e-10, so the numerical rank is 1;
    # oracle: an independent SVD agrees
    m = Mat.from_numpy(C, np.array([[1, 1], [1, 1 + 1e-15]]))
    rr = unitary_rank_reveal(m)
    assert rr.rank == 1
    s = np.linalg.svd(m.to_numpy(), compute_uv=False)
    assert int(np.sum(s > 1e-10 * s[0])) == 1


def test_unitary_rank_empty():
    assert unitary_rank_reveal(Mat.zeros(C, 2, 3)).rank == 0


def test_unitary_transforms_are_unitary_and_shape_holds():
    rng = random.Random(7)
    for _ in range(40):
        rows, cols = rng.randint(0, 5), rng.randint(0, 5)
        m = Mat.from_numpy(C, np.array(
            [[complex(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(cols)]
             for _ in range(rows)])) if rows and cols else Mat.zeros(C, rows, cols)
        rr = unitary_rank_reveal(m)
        r, en, tn = rr.rank, rr.left.to_numpy(), rr.right.to_numpy()
        eps = C.eps
        if rows:
            assert np.max(np.abs(en.conj().T @ en - np.eye(rows))) <= 10 * max(eps, 1e-12)
        if cols:
            assert np.max(np.abs(tn.conj().T @ tn - np.eye(cols))) <= 10 * max(eps, 1e-12)
        if rows and cols:
            res = en @ m.to_numpy() @ tn
            scale = max(np.max(np.abs(m.to_numpy())), 1.0)
            zero_part = res.copy()
            zero_part[rows - r:, cols - r:] = 0
            assert np.max(np.abs(zero_part)) <= 10 * eps * scale


def test_rank_equals_rank_of_transpose_and_star():
    # 500 random instances per field
    rng = random.Random(8)
    for field in (Q, QI, GF5):
        for _ in range(500):
            m = random_mat(rng, field, rng.randint(0, 3), rng.randint(0, 3),
                           span=2)
            r = rank(m)
            assert r == rank(m.transpose()) == rank(m.conj_transpose())


def test_solve_right_full_row_rank():
    rng = random.Random(9)
    for _ in range(50):
        rows = rng.randint(0, 3)
        cols = rows + rng.randint(0, 2)
        a = random_mat(rng, Q, rows, cols, span=2)
        if exact_rank(a) != rows:
            continue
        b = random_mat(rng, Q, rows, rng.randint(0, 3), span=2)
        x = solve_right(a, b)
        assert a @ x == b


def test_unitary_row_compress():
    m = Mat.from_numpy(C, np.array([[1, 2], [2, 4], [0, 0]]))
    r, e = unitary_row_compress(m, zeros_at="top")
    assert r == 1
    res = (e @ m).to_numpy()
    assert np.max(np.abs(res[:2, :])) <= 1e-9


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

from hypothesis import given, settings
from hypothesis import strategies as st

_small_int_matrix = st.integers(0, 3).flatmap(
    lambda rows: st.integers(0, 3).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(-4, 4), min_size=cols, max_size=cols),
            min_size=rows, max_size=rows)))


@settings(max_examples=120, deadline=None)
@given(_small_int_matrix)
def test_rank_reveal_certifies_itself(rows_of_ints):
    m = Mat.from_int_rows(Q, rows_of_ints, cols=len(rows_of_ints[0]) if rows_of_ints else 0)
    r, e, t = exact_rank_reveal(m, "br")
    res = e @ m @ t
    for i in range(m.rows):
        for j in range(m.cols):
            want = Q.one() if (i >= m.rows - r and j >= m.cols - r
                               and i - (m.rows - r) == j - (m.cols - r)) else Q.zero()
            assert Q.eq(res.data[i][j], want)
    assert is_nonsingular(e) and is_nonsingular(t)


@settings(max_examples=120, deadline=None)
@given(_small_int_matrix, _small_int_matrix)
def test_direct_sum_shapes_and_rank_additivity(a_ints, b_ints):
    a = Mat.from_int_rows(Q, a_ints, cols=len(a_ints[0]) if a_ints else 0)
    b = Mat.from_int_rows(Q, b_ints, cols=len(b_ints[0]) if b_ints else 0)
    ds = a.direct_sum(b)
    assert ds.shape == (a.rows + b.rows, a.cols + b.cols)
    assert exact_rank(ds) == exact_rank(a) + exact_rank(b)
