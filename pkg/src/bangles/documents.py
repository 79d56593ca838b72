"""On-disk document format (JSON text, version "1").

Every document carries a field descriptor and one payload: a bangle, a form,
a mapping, or a decomposition (whose witness rides along).  Scalars are the
literal strings of the field grammar: rationals "a/b", Gaussian rationals
"a/b+c/di", GF(p) residues, complex floats "x+yi".  Serialization is
deterministic (sorted keys, fixed separators) so equal inputs give
byte-identical outputs.

Strip and attachment indices are 1-based in documents, 0-based in memory.
"""

import json

from .bangle import Bangle, SingularSummand, Witness, E_IN_STRIP, PLAIN
from .errors import InvariantViolation, ParseError
from .fields import ScalarField
from .forms import FORM_KINDS, MAPPING_KINDS, FormMatrix, MappingMatrix
from .matrix import Mat
from .regularize import RegularizingDecomposition

VERSION = "1"


# ---------------------------------------------------------------------------
# field descriptors
# ---------------------------------------------------------------------------

def field_to_json(field):
    out = {"name": field.kind}
    if field.kind == "GF":
        out["p"] = field.p
    if field.kind == "C":
        out["eps"] = field.eps
    if field.kind in ("Qi", "C"):
        out["involution"] = field.involution
    return out


def field_from_json(obj):
    if not isinstance(obj, dict) or "name" not in obj:
        raise ParseError("field descriptor must be an object with a name")
    name = obj["name"]
    if name == "Q":
        return ScalarField.rational()
    if name == "Qi":
        return ScalarField.gaussian(obj.get("involution", "conj"))
    if name == "GF":
        if "p" not in obj:
            raise ParseError("GF field descriptor needs p")
        return ScalarField.gf(int(obj["p"]))
    if name == "C":
        return ScalarField.complex_float(float(obj.get("eps", 1e-10)),
                                         obj.get("involution", "conj"))
    raise ParseError(f"unknown field name {name!r}")


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def mat_to_json(mat):
    f = mat.field
    return {"rows": mat.rows, "cols": mat.cols,
            "data": [[f.format_scalar(x) for x in row] for row in mat.data]}


def mat_from_json(obj, field, where="matrix"):
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError):
        raise ParseError(f"{where}: need rows, cols, data") from None
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ParseError(f"{where}: data does not match {rows}x{cols}")
    parsed = [[field.parse_scalar(x) for x in row] for row in data]
    return Mat(field, rows, cols, parsed)


# ---------------------------------------------------------------------------
# payloads
# ---------------------------------------------------------------------------

def bangle_to_json(bangle):
    f = bangle.field
    return {
        "t": bangle.t,
        "k": bangle.boxed + 1,
        "rows": bangle.n_rows,
        "cols": list(bangle.widths),
        "strips": [[f.format_scalar(x) for row in s.data for x in row]
                   for s in bangle.strips],
    }


def bangle_from_json(obj, field):
    try:
        t = int(obj["t"])
        k = int(obj["k"])
        rows = int(obj["rows"])
        cols = [int(c) for c in obj["cols"]]
        strips_flat = obj["strips"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("bangle: need t, k, rows, cols, strips") from None
    if len(cols) != t or len(strips_flat) != t:
        raise ParseError("bangle: cols and strips must list t entries")
    if not 1 <= k <= t:
        raise ParseError(f"bangle: boxed index k={k} out of range 1..{t}")
    strips = []
    for i, flat in enumerate(strips_flat):
        w = cols[i]
        if len(flat) != rows * w:
            raise ParseError(f"bangle: strip {i + 1} needs {rows * w} entries")
        vals = [field.parse_scalar(x) for x in flat]
        strips.append(Mat(field, rows, w,
                          [vals[r * w:(r + 1) * w] for r in range(rows)]))
    if cols[k - 1] != rows:
        raise InvariantViolation("bangle: the boxed strip is not square")
    return Bangle(field, strips, k - 1)


def form_to_json(form):
    return {"kind": form.kind, "A": mat_to_json(form.a), "B": mat_to_json(form.b)}


def form_from_json(obj, field):
    kind = obj.get("kind")
    if kind not in FORM_KINDS:
        raise ParseError(f"form: unknown kind {kind!r}")
    return FormMatrix(kind, mat_from_json(obj["A"], field, "A"),
                      mat_from_json(obj["B"], field, "B"))


def mapping_to_json(mapping):
    return {"kind": mapping.kind, "A": mat_to_json(mapping.a),
            "B": mat_to_json(mapping.b)}


def mapping_from_json(obj, field):
    kind = obj.get("kind")
    if kind not in MAPPING_KINDS:
        raise ParseError(f"mapping: unknown kind {kind!r}")
    return MappingMatrix(kind, mat_from_json(obj["A"], field, "A"),
                         mat_from_json(obj["B"], field, "B"))


def witness_to_json(witness):
    return {
        "mode": witness.mode,
        "partition": list(witness.partition),
        "k": witness.boxed + 1,
        "mat": mat_to_json(witness.mat),
    }


def witness_from_json(obj, field):
    try:
        mode = obj["mode"]
        partition = tuple(int(x) for x in obj["partition"])
        k = int(obj["k"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("witness: need mode, partition, k, mat") from None
    mat = mat_from_json(obj["mat"], field, "witness matrix")
    return Witness(mode, partition, k - 1, mat)


def summand_to_json(s):
    out = {"attachment": s.attachment, "q": s.q}
    if s.attachment == E_IN_STRIP:
        out["strip"] = s.strip + 1
    return out


def summand_from_json(obj):
    att = obj.get("attachment")
    if att == PLAIN:
        return SingularSummand(PLAIN, int(obj["q"]))
    if att == E_IN_STRIP:
        return SingularSummand(E_IN_STRIP, int(obj["q"]), int(obj["strip"]) - 1)
    raise ParseError(f"summand: unknown attachment {att!r}")


def decomposition_to_json(dec):
    return {
        "mode": dec.mode,
        "layout": {"t": dec.t, "k": dec.boxed + 1},
        "K": mat_to_json(dec.regular),
        "summands": [summand_to_json(s) for s in dec.singular],
        "witness": witness_to_json(dec.witness),
        "step_ranks": [[kind, list(ranks)] for kind, ranks in dec.step_ranks],
    }


def decomposition_from_json(obj, field):
    try:
        mode = obj["mode"]
        t = int(obj["layout"]["t"])
        k = int(obj["layout"]["k"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("decomposition: need mode, layout, K, summands, witness") from None
    kmat = mat_from_json(obj["K"], field, "K")
    summands = tuple(summand_from_json(s) for s in obj.get("summands", []))
    witness = witness_from_json(obj["witness"], field)
    ranks = tuple((kind, tuple(r)) for kind, r in obj.get("step_ranks", []))
    return RegularizingDecomposition(mode, t, k - 1, kmat, summands, witness,
                                     ranks)


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------

_PAYLOADS = ("bangle", "form", "mapping", "decomposition", "witness")


def document_to_text(field, payload_kind, payload_json, extra=None):
    doc = {"version": VERSION, "field": field_to_json(field),
           payload_kind: payload_json}
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def parse_document(text):
    """Returns (field, payload_kind, in-memory object, raw document)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    if doc.get("version") != VERSION:
        raise ParseError(f"unsupported document version {doc.get('version')!r}")
    field = field_from_json(doc.get("field", {}))
    present = [k for k in _PAYLOADS if k in doc]
    if len(present) != 1:
        raise ParseError(f"document must carry exactly one payload of {_PAYLOADS}")
    kind = present[0]
    if kind == "bangle":
        obj = bangle_from_json(doc["bangle"], field)
    elif kind == "form":
        obj = form_from_json(doc["form"], field)
    elif kind == "mapping":
        obj = mapping_from_json(doc["mapping"], field)
    elif kind == "witness":
        obj = witness_from_json(doc["witness"], field)
    else:
        obj = decomposition_from_json(doc["decomposition"], field)
    return field, kind, obj, doc
