"""Command-line front end.

Subcommands read one document from standard input and print one document to
standard output.  Exit codes: 0 success, 1 input or verification error, 2
honest numerical failure (NonConvergence / IllConditioned), so scripts can
tell a bad certificate from a tolerance problem.
"""

import argparse
import sys

from .bangle import SIM, STAR
from .canonical import canonical_bangle
from .documents import (bangle_to_json, decomposition_to_json,
                        document_to_text, field_from_json, form_to_json,
                        mapping_to_json, parse_document)
from .errors import BangleError, IllConditioned, NonConvergence, ParseError
from .fields import ScalarField
from .forms import bangle_of_form, bangle_of_mapping
from .regularize import regularize
from .sampling import random_bangle, rng_from_seed

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NUMERICAL = 2


def _with_eps(field, eps):
    if eps is None or field.kind != "C":
        return field
    return ScalarField.complex_float(eps, field.involution)


def _retag_bangle(bangle, field):
    if bangle.field == field:
        return bangle
    from .bangle import Bangle
    from .matrix import Mat
    strips = [Mat(field, s.rows, s.cols, [list(r) for r in s.data])
              for s in bangle.strips]
    return Bangle(field, strips, bangle.boxed)


def _read_stdin():
    return sys.stdin.read()


def _mode(text):
    if text == "star":
        return STAR
    if text == "sim":
        return SIM
    raise ParseError(f"unknown mode {text!r}")


def cmd_regularize(args):
    field, kind, obj, _ = parse_document(_read_stdin())
    if kind != "bangle":
        raise ParseError("regularize expects a bangle document")
    field = _with_eps(field, args.eps)
    obj = _retag_bangle(obj, field)
    dec = regularize(obj, _mode(args.mode))
    payload = decomposition_to_json(dec)
    text = document_to_text(field, "decomposition", payload)
    sys.stdout.write(text)
    if args.witness:
        with open(args.witness, "w") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_canonical(args):
    field, kind, obj, _ = parse_document(_read_stdin())
    field = _with_eps(field, args.eps)
    mode = _mode(args.mode)
    if kind == "bangle":
        obj = _retag_bangle(obj, field)
        out, report = canonical_bangle(obj, mode)
        payload, name = bangle_to_json(out), "bangle"
    elif kind == "form":
        from .forms import canonicalize_form
        out, report = canonicalize_form(obj)
        payload, name = form_to_json(out), "form"
    elif kind == "mapping":
        from .forms import canonicalize_mapping
        out, report = canonicalize_mapping(obj)
        payload, name = mapping_to_json(out), "mapping"
    else:
        raise ParseError("canonical expects a bangle, form, or mapping document")
    extra = {"report": {
        "replaced": report.replaced,
        "flags": list(report.flags),
        "summands": [{"attachment": s.attachment, "q": s.q,
                      "strip": s.strip + 1 if s.strip >= 0 else None}
                     for s in report.summands],
    }}
    sys.stdout.write(document_to_text(field, name, payload, extra))
    return EXIT_OK


def cmd_from_form(args):
    field, kind, obj, _ = parse_document(_read_stdin())
    if kind != "form":
        raise ParseError("from-form expects a form document")
    if obj.kind != args.kind:
        raise ParseError(f"document holds a {obj.kind} form, not {args.kind}")
    bangle = bangle_of_form(obj)
    sys.stdout.write(document_to_text(field, "bangle", bangle_to_json(bangle)))
    return EXIT_OK


def cmd_from_mapping(args):
    field, kind, obj, _ = parse_document(_read_stdin())
    if kind != "mapping":
        raise ParseError("from-mapping expects a mapping document")
    if obj.kind != args.kind:
        raise ParseError(f"document holds a {obj.kind} mapping, not {args.kind}")
    bangle = bangle_of_mapping(obj)
    sys.stdout.write(document_to_text(field, "bangle", bangle_to_json(bangle)))
    return EXIT_OK


def cmd_verify(args):
    field, kind, obj, _ = parse_document(_read_stdin())
    if kind != "bangle":
        raise ParseError("verify expects the original bangle on stdin")
    with open(args.witness) as fh:
        wfield, wkind, dec, _ = parse_document(fh.read())
    if wkind != "decomposition":
        raise ParseError("--witness file must hold a decomposition document")
    if wfield != field:
        same_carrier = (wfield.kind == field.kind == "C"
                        and wfield.involution == field.involution)
        if not same_carrier:
            raise ParseError("witness and bangle use different fields")
        # the certificate states the tolerance it claims; adopt its eps
        obj = _retag_bangle(obj, wfield)
    if dec.verify(obj):
        sys.stdout.write("witness certification passed\n")
        return EXIT_OK
    sys.stderr.write("witness certification failed\n")
    return EXIT_ERROR


def cmd_random(args):
    name = {"q": "Q", "qi": "Qi", "gf2": "GF", "gf5": "GF", "c": "C"}[args.field]
    descr = {"name": name}
    if args.field == "gf2":
        descr["p"] = 2
    if args.field == "gf5":
        descr["p"] = 5
    if args.field == "c":
        descr["eps"] = args.eps if args.eps else 1e-10
    field = field_from_json(descr)
    dims = [int(x) for x in args.dims.split(",")] if args.dims else None
    rng = rng_from_seed(args.seed)
    t = args.t
    k = args.k
    if dims is None:
        dims = [rng.randint(0, 3) for _ in range(t)]
        dims[k - 1] = rng.randint(0, 4)
    if len(dims) != t:
        raise ParseError("--dims must list one width per strip")
    bangle = random_bangle(rng, field, t, k - 1, tuple(dims), span=args.span)
    sys.stdout.write(document_to_text(field, "bangle", bangle_to_json(bangle)))
    return EXIT_OK


def cmd_selftest(args):
    """A fast end-to-end battery over all exact fields and both modes."""
    from .bangle import Bangle
    from .sampling import random_bangle_shape, random_witness
    rng = rng_from_seed(20240901)
    fields = [ScalarField.rational(), ScalarField.gaussian(),
              ScalarField.gf(2), ScalarField.gf(5)]
    runs = 0
    for trial in range(40):
        f = fields[trial % 4]
        mode = STAR if trial % 2 else SIM
        t, k0, widths = random_bangle_shape(rng, t_max=3, box_max=4, total_max=8)
        a = random_bangle(rng, f, t, k0, widths, span=2)
        dec = regularize(a, mode)
        if not dec.verify(a):
            sys.stderr.write("selftest: witness verification failed\n")
            return EXIT_ERROR
        w = random_witness(rng, f, mode, widths, k0)
        dec2 = regularize(w.apply(a), mode)
        if dec.summand_multiset() != dec2.summand_multiset():
            sys.stderr.write("selftest: orbit invariance failed\n")
            return EXIT_ERROR
        runs += 1
    sys.stdout.write(f"selftest passed ({runs} randomized runs)\n")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="bangles",
        description="Regularizing decompositions and canonical forms of "
                    "boxed-strip block matrices, with certified witnesses.")
    sub = p.add_subparsers(dest="command", required=True)

    reg = sub.add_parser("regularize", help="decompose a bangle")
    reg.add_argument("--mode", required=True, choices=["star", "sim"])
    reg.add_argument("--eps", type=float, default=None,
                     help="rank tolerance override for complex-float input")
    reg.add_argument("--witness", default=None,
                     help="also write the certificate to this file")
    reg.set_defaults(func=cmd_regularize)

    can = sub.add_parser("canonical", help="canonical form of a bangle/form/mapping")
    can.add_argument("--mode", required=True, choices=["star", "sim"])
    can.add_argument("--eps", type=float, default=None)
    can.set_defaults(func=cmd_canonical)

    ff = sub.add_parser("from-form", help="form document to bangle document")
    ff.add_argument("--kind", required=True, choices=["UxV", "QuotxV"])
    ff.set_defaults(func=cmd_from_form)

    fm = sub.add_parser("from-mapping", help="mapping document to bangle document")
    fm.add_argument("--kind", required=True,
                    choices=["UtoV", "VtoU", "QtoV", "VtoQ"])
    fm.set_defaults(func=cmd_from_mapping)

    ver = sub.add_parser("verify", help="check a decomposition certificate")
    ver.add_argument("--witness", required=True,
                     help="decomposition document with the witness")
    ver.set_defaults(func=cmd_verify)

    rnd = sub.add_parser("random", help="emit a seeded random bangle")
    rnd.add_argument("--seed", type=int, required=True)
    rnd.add_argument("--t", type=int, default=2)
    rnd.add_argument("--k", type=int, default=1)
    rnd.add_argument("--dims", default=None, help="comma-separated strip widths")
    rnd.add_argument("--field", default="q", choices=["q", "qi", "gf2", "gf5", "c"])
    rnd.add_argument("--span", type=int, default=3)
    rnd.add_argument("--eps", type=float, default=None)
    rnd.set_defaults(func=cmd_random)

    st = sub.add_parser("selftest", help="run the built-in consistency battery")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NonConvergence, IllConditioned) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except BangleError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
