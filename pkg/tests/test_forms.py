import random

import pytest

from bangles.bangle import SingularSummand, e_col, jordan, E_IN_STRIP
from bangles.errors import ShapeMismatch
from bangles.fields import ScalarField
from bangles.forms import (BasisChange, FORM_KINDS, FormMatrix,
                           MAPPING_KINDS, MappingMatrix, Q_TO_V, QUOT_X_V,
                           U_TO_V, U_X_V, V_TO_Q, V_TO_U, bangle_of_form,
                           bangle_of_mapping, canonicalize_form,
                           canonicalize_mapping, form_of_bangle,
                           mapping_of_bangle, transform_form,
                           transform_mapping, verify_equivalence,
                           witness_of_change)
from bangles.matrix import Mat
from bangles.sampling import random_mat, random_nonsingular

Q = ScalarField.rational()
QI = ScalarField.gaussian()

ALL_KINDS = FORM_KINDS + MAPPING_KINDS
STACKED = (U_TO_V, Q_TO_V)
P_IS_WIDE = (U_X_V, V_TO_U, U_TO_V)     # kinds whose P block is m x (n-m)


def make_random(rng, field, kind, m, nm):
    if kind in FORM_KINDS:
        return FormMatrix(kind, random_mat(rng, field, m, m),
                          random_mat(rng, field, m, nm))
    b = (random_mat(rng, field, nm, m) if kind in STACKED
         else random_mat(rng, field, m, nm))
    return MappingMatrix(kind, random_mat(rng, field, m, m), b)


def make_change(rng, field, kind, m, nm):
    s = random_nonsingular(rng, field, m)
    q = random_nonsingular(rng, field, nm)
    p = (random_mat(rng, field, m, nm) if kind in P_IS_WIDE
         else random_mat(rng, field, nm, m))
    return BasisChange(s, q, p)


def apply_change(obj, change):
    return (transform_form(obj, change) if isinstance(obj, FormMatrix)
            else transform_mapping(obj, change))


# ---------------------------------------------------------------------------
# translations
# ---------------------------------------------------------------------------

def test_uxv_single_regular_block():
    f = FormMatrix(U_X_V, Mat.from_int_rows(Q, [[1]]), Mat.zeros(Q, 1, 0))
    b = bangle_of_form(f)
    assert b.boxed == 0 and b.widths == (1, 0)


def test_quotxv_nilpotent_block_layout():
    f = FormMatrix(QUOT_X_V, jordan(Q, 2, Q.zero()), e_col(Q, 2))
    b = bangle_of_form(f)
    assert b.boxed == 1
    assert b.strips[0] == e_col(Q, 2)
    assert b.strips[1] == jordan(Q, 2, Q.zero())


def test_uxv_empty_subspace_gives_zero_columns():
    f = FormMatrix(U_X_V, Mat.zeros(Q, 0, 0), Mat.zeros(Q, 0, 3))
    out, rep = canonicalize_form(f)
    assert rep.summands == tuple([SingularSummand(E_IN_STRIP, 0, 1)] * 3)


def test_round_trips_all_kinds_and_edge_shapes():
    rng = random.Random(51)
    for kind in ALL_KINDS:
        for m, nm in [(0, 0), (0, 3), (2, 0), (3, 2)]:
            obj = make_random(rng, Q, kind, m, nm)
            if kind in FORM_KINDS:
                assert form_of_bangle(bangle_of_form(obj), kind) == obj
            else:
                assert mapping_of_bangle(bangle_of_mapping(obj), kind) == obj


def test_mapping_translation_uses_plain_transposes():
    i = QI.imag_unit()
    a = Mat.from_rows(QI, [[i]])
    m = MappingMatrix(V_TO_Q, a, Mat.zeros(QI, 1, 0))
    b = bangle_of_mapping(m)
    assert b.box == a                       # no conjugation anywhere
    m2 = MappingMatrix(U_TO_V, a, Mat.zeros(QI, 0, 1))
    b2 = bangle_of_mapping(m2)
    assert b2.box == a.transpose()
    assert b2.box.data[0][0] == i            # transpose, not conj transpose


def test_vtou_identity_mapping_is_fixed():
    m = MappingMatrix(V_TO_U, Mat.identity(Q, 2), Mat.zeros(Q, 2, 0))
    out, rep = canonicalize_mapping(m)
    assert rep.summands == ()
    assert out.a.shape == (2, 2)


def test_nilpotent_vtoq_is_canonical_fixed_point():
    m = MappingMatrix(V_TO_Q, jordan(Q, 2, Q.zero()), e_col(Q, 2))
    out, rep = canonicalize_mapping(m)
    assert out == m
    assert rep.summands == (SingularSummand(E_IN_STRIP, 2, 0),)


# ---------------------------------------------------------------------------
# change-of-basis laws
# ---------------------------------------------------------------------------

def test_identity_change_is_verified():
    rng = random.Random(52)
    for kind in ALL_KINDS:
        obj = make_random(rng, Q, kind, 2, 2)
        ch = BasisChange(Mat.identity(Q, 2), Mat.identity(Q, 2),
                         Mat.zeros(Q, 2, 2))
        assert verify_equivalence(obj, obj, ch)


def test_one_by_one_star_law():
    f = FormMatrix(U_X_V, Mat.from_int_rows(Q, [[1]]), Mat.zeros(Q, 1, 0))
    ch = BasisChange(Mat.from_int_rows(Q, [[2]]), Mat.zeros(Q, 0, 0),
                     Mat.zeros(Q, 1, 0))
    moved = transform_form(f, ch)
    assert moved.a == Mat.from_int_rows(Q, [[4]])
    assert verify_equivalence(f, moved, ch)


def test_shape_mismatch_is_raised():
    f1 = FormMatrix(U_X_V, Mat.identity(Q, 2), Mat.zeros(Q, 2, 1))
    ch = BasisChange(Mat.identity(Q, 2), Mat.identity(Q, 1),
                     Mat.zeros(Q, 1, 2))           # P transposed wrongly
    with pytest.raises(ShapeMismatch):
        transform_form(f1, ch)


def test_change_witness_matches_bangle_action():
    rng = random.Random(53)
    for trial in range(90):
        kind = ALL_KINDS[trial % 6]
        m, nm = rng.randint(0, 3), rng.randint(0, 3)
        obj = make_random(rng, Q, kind, m, nm)
        ch = make_change(rng, Q, kind, m, nm)
        moved = apply_change(obj, ch)
        w = witness_of_change(obj, ch)
        if kind in FORM_KINDS:
            assert w.apply(bangle_of_form(obj)) == bangle_of_form(moved)
        else:
            assert w.apply(bangle_of_mapping(obj)) == bangle_of_mapping(moved)
        assert verify_equivalence(obj, moved, ch)


def test_canonical_descriptors_invariant_under_changes():
    rng = random.Random(54)
    for trial in range(60):
        kind = ALL_KINDS[trial % 6]
        m, nm = rng.randint(0, 3), rng.randint(0, 3)
        obj = make_random(rng, Q, kind, m, nm)
        ch = make_change(rng, Q, kind, m, nm)
        if kind in FORM_KINDS:
            _, r1 = canonicalize_form(obj)
            _, r2 = canonicalize_form(apply_change(obj, ch))
        else:
            _, r1 = canonicalize_mapping(obj)
            _, r2 = canonicalize_mapping(apply_change(obj, ch))
        assert r1.descriptor() == r2.descriptor()


def test_canonical_outputs_are_fixed_points():
    rng = random.Random(55)
    for trial in range(30):
        kind = ALL_KINDS[trial % 6]
        m, nm = rng.randint(0, 2), rng.randint(0, 2)
        obj = make_random(rng, Q, kind, m, nm)
        if kind in FORM_KINDS:
            out, r1 = canonicalize_form(obj)
            out2, r2 = canonicalize_form(out)
        else:
            out, r1 = canonicalize_mapping(obj)
            out2, r2 = canonicalize_mapping(out)
        assert r1.descriptor() == r2.descriptor()
        assert out2 == out


def test_scrambled_mixed_form_recovers_summands():
    # regular 1x1 block plus a [J_1(0) | E_1] summand, scrambled by (a.1)
    rng = random.Random(56)
    a = Mat.from_int_rows(Q, [[1, 0], [0, 0]])
    b = Mat.from_int_rows(Q, [[0], [1]])
    f = FormMatrix(U_X_V, a, b)
    for _ in range(15):
        ch = make_change(rng, Q, U_X_V, 2, 1)
        _, rep = canonicalize_form(transform_form(f, ch))
        assert rep.summands == (SingularSummand(E_IN_STRIP, 1, 1),)


def test_bilinear_over_q_reports_invariants_not_blocks():
    # exact bilinear input whose congruence class needs eigenvalues outside
    # the field: the regular part is kept and the class is reported
    f = FormMatrix(U_X_V, Mat.from_int_rows(Q, [[0, 1], [2, 0]]),
                   Mat.zeros(Q, 2, 0))
    out, rep = canonicalize_form(f)
    assert not rep.replaced
    assert rep.regular_congruence is not None
    assert rep.summands == ()
    assert any("regular part kept" in fl for fl in rep.flags)
