import pytest

from bangles.bangle import STAR
from bangles.documents import (bangle_to_json, decomposition_to_json,
                               document_to_text, field_from_json,
                               field_to_json, parse_document)
from bangles.errors import InvariantViolation, ParseError
from bangles.fields import ScalarField
from bangles.regularize import regularize
from bangles.sampling import random_bangle, rng_from_seed

Q = ScalarField.rational()


def test_minimal_bangle_round_trip():
    doc = document_to_text(Q, "bangle",
                           {"t": 1, "k": 1, "rows": 0, "cols": [0], "strips": [[]]})
    field, kind, obj, _ = parse_document(doc)
    assert kind == "bangle"
    assert obj.n_rows == 0 and obj.widths == (0,)
    assert document_to_text(field, "bangle", bangle_to_json(obj)) == doc


def test_field_descriptors_round_trip():
    for f in (Q, ScalarField.gaussian(), ScalarField.gaussian("id"),
              ScalarField.gf(7), ScalarField.complex_float(1e-8)):
        assert field_from_json(field_to_json(f)) == f


def test_serialized_decomposition_reverifies():
    rng = rng_from_seed(61)
    a = random_bangle(rng, Q, 2, 0, (2, 2), span=2)
    dec = regularize(a, STAR)
    text = document_to_text(Q, "decomposition", decomposition_to_json(dec))
    _, kind, dec2, _ = parse_document(text)
    assert kind == "decomposition"
    assert dec2.verify(a)
    assert dec2.summand_multiset() == dec.summand_multiset()


def test_malformed_scalar_is_a_parse_error():
    doc = document_to_text(Q, "bangle",
                           {"t": 1, "k": 1, "rows": 1, "cols": [1],
                            "strips": [["1/0"]]})
    with pytest.raises(ParseError):
        parse_document(doc)


def test_bad_json_reports_position():
    with pytest.raises(ParseError) as err:
        parse_document("{\n  broken\n}")
    assert err.value.line is not None


def test_nonsquare_box_is_an_invariant_violation():
    doc = document_to_text(Q, "bangle",
                           {"t": 1, "k": 1, "rows": 2, "cols": [1],
                            "strips": [["1", "2"]]})
    with pytest.raises(InvariantViolation):
        parse_document(doc)


def test_serialization_is_deterministic():
    rng = rng_from_seed(62)
    a = random_bangle(rng, Q, 3, 1, (1, 2, 2), span=3)
    t1 = document_to_text(Q, "bangle", bangle_to_json(a))
    t2 = document_to_text(Q, "bangle", bangle_to_json(a))
    assert t1 == t2
    dec = regularize(a, STAR)
    d1 = document_to_text(Q, "decomposition", decomposition_to_json(dec))
    dec2 = regularize(a, STAR)
    d2 = document_to_text(Q, "decomposition", decomposition_to_json(dec2))
    assert d1 == d2


def test_round_trip_across_fields():
    for f in (Q, ScalarField.gaussian(), ScalarField.gf(5),
              ScalarField.complex_float()):
        rng = rng_from_seed(63)
        a = random_bangle(rng, f, 2, 1, (2, 2), span=2)
        text = document_to_text(f, "bangle", bangle_to_json(a))
        _, _, b, _ = parse_document(text)
        if f.is_exact:
            assert b == a
        else:
            assert b.close_to(a, 0.0)       # repr round-trips floats exactly
