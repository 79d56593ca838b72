"""Scalar fields with involution.

Four field kinds are supported, all behind one arithmetic interface:

* ``RationalQ``     -- exact rationals (gmpy2.mpq carriers)
* ``GaussianQi``    -- exact Gaussian rationals, stored as (re, im) pairs of
                       rationals; involution is either complex conjugation or
                       the identity (the identity view turns *congruence into
                       plain congruence)
* ``PrimeGF(p)``    -- the prime field Z/pZ with the identity involution
* ``ComplexFloat``  -- complex doubles with a relative rank tolerance ``eps``

Scalars are plain Python values (mpq / tuple / int / complex); the field
object owns the arithmetic.  Exact scalars are kept in canonical reduced
form by the carrier types themselves, so equality is decidable and exact.

Zero tests on ComplexFloat always take a caller-supplied scale; rank
decisions are a matrix-level concern and are never made here with a bare
``== 0``.
"""

import re

from gmpy2 import mpq

from .errors import DivisionByZero, ParseError

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class ScalarField:
    """A field with involution.  Immutable; safe to share between threads."""

    __slots__ = ("kind", "involution", "p", "eps")

    def __init__(self, kind, involution="id", p=None, eps=None):
        if kind not in ("Q", "Qi", "GF", "C"):
            raise ValueError(f"unknown field kind {kind!r}")
        if involution not in ("id", "conj"):
            raise ValueError(f"unknown involution {involution!r}")
        if kind in ("Q", "GF") and involution != "id":
            raise ValueError(f"{kind} only supports the identity involution")
        if kind == "GF":
            if p is None or not _is_prime(p):
                raise ValueError(f"GF modulus must be prime, got {p}")
        if kind == "C":
            eps = 1e-10 if eps is None else float(eps)
            if eps <= 0:
                raise ValueError("ComplexFloat eps must be positive")
        self.kind = kind
        self.involution = involution
        self.p = p
        self.eps = eps

    # ---- constructors ------------------------------------------------

    @staticmethod
    def rational():
        return ScalarField("Q")

    @staticmethod
    def gaussian(involution="conj"):
        return ScalarField("Qi", involution=involution)

    @staticmethod
    def gf(p):
        return ScalarField("GF", p=p)

    @staticmethod
    def complex_float(eps=1e-10, involution="conj"):
        return ScalarField("C", involution=involution, eps=eps)

    # ---- identity ------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, ScalarField)
            and self.kind == other.kind
            and self.involution == other.involution
            and self.p == other.p
            and self.eps == other.eps
        )

    def __hash__(self):
        return hash((self.kind, self.involution, self.p, self.eps))

    def __repr__(self):
        if self.kind == "Q":
            return "Q"
        if self.kind == "Qi":
            return f"Qi[{self.involution}]"
        if self.kind == "GF":
            return f"GF({self.p})"
        return f"C[eps={self.eps:g},{self.involution}]"

    @property
    def is_exact(self):
        return self.kind != "C"

    @property
    def conjugating(self):
        return self.involution == "conj"

    # ---- element construction -------------------------------------------

    def zero(self):
        if self.kind == "Q":
            return mpq(0)
        if self.kind == "Qi":
            return (mpq(0), mpq(0))
        if self.kind == "GF":
            return 0
        return 0j

    def one(self):
        if self.kind == "Q":
            return mpq(1)
        if self.kind == "Qi":
            return (mpq(1), mpq(0))
        if self.kind == "GF":
            return 1 % self.p
        return 1 + 0j

    def from_int(self, n):
        if self.kind == "Q":
            return mpq(n)
        if self.kind == "Qi":
            return (mpq(n), mpq(0))
        if self.kind == "GF":
            return n % self.p
        return complex(n)

    def imag_unit(self):
        """The scalar i where it exists (Qi and C only)."""
        if self.kind == "Qi":
            return (mpq(0), mpq(1))
        if self.kind == "C":
            return 1j
        raise ValueError(f"{self!r} has no imaginary unit")

    # ---- arithmetic -------------------------------------------------------

    def add(self, a, b):
        if self.kind == "Qi":
            return (a[0] + b[0], a[1] + b[1])
        if self.kind == "GF":
            return (a + b) % self.p
        return a + b

    def sub(self, a, b):
        if self.kind == "Qi":
            return (a[0] - b[0], a[1] - b[1])
        if self.kind == "GF":
            return (a - b) % self.p
        return a - b

    def neg(self, a):
        if self.kind == "Qi":
            return (-a[0], -a[1])
        if self.kind == "GF":
            return (-a) % self.p
        return -a

    def mul(self, a, b):
        if self.kind == "Qi":
            ar, ai = a
            br, bi = b
            return (ar * br - ai * bi, ar * bi + ai * br)
        if self.kind == "GF":
            return (a * b) % self.p
        return a * b

    def inv(self, a):
        if self.kind == "Q":
            if a == 0:
                raise DivisionByZero("inverse of zero")
            return 1 / a
        if self.kind == "Qi":
            ar, ai = a
            n = ar * ar + ai * ai
            if n == 0:
                raise DivisionByZero("inverse of zero")
            return (ar / n, -ai / n)
        if self.kind == "GF":
            if a % self.p == 0:
                raise DivisionByZero("inverse of zero")
            return pow(a, -1, self.p)
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def conj(self, a):
        if self.involution == "id":
            return a
        if self.kind == "Qi":
            return (a[0], -a[1])
        return a.conjugate()

    # ---- predicates ------------------------------------------------

    def eq(self, a, b):
        if self.kind == "Qi":
            return a[0] == b[0] and a[1] == b[1]
        return a == b

    def is_zero(self, a, scale=None):
        """Exact zero test; ComplexFloat needs a caller-supplied scale."""
        if self.kind == "Qi":
            return a[0] == 0 and a[1] == 0
        if self.kind == "C":
            if scale is None:
                raise ValueError("ComplexFloat zero test requires a scale")
            return abs(a) <= self.eps * scale
        return a == 0

    def abs2(self, a):
        """Squared magnitude, exact where the field is."""
        if self.kind == "Q":
            return a * a
        if self.kind == "Qi":
            return a[0] * a[0] + a[1] * a[1]
        if self.kind == "GF":
            raise ValueError("GF(p) has no magnitude")
        x = abs(a)
        return x * x

    def to_complex(self, a):
        if self.kind == "Q":
            return complex(float(a))
        if self.kind == "Qi":
            return complex(float(a[0]), float(a[1]))
        if self.kind == "GF":
            raise ValueError("GF(p) scalars have no complex image")
        return complex(a)

    # ---- literals ----------------------------------------------------

    def format_scalar(self, a):
        if self.kind == "Q":
            return str(a)
        if self.kind == "GF":
            return str(a % self.p)
        if self.kind == "Qi":
            re_, im = a
            if im == 0:
                return str(re_)
            im_s = "" if im == 1 else ("-" if im == -1 else str(im))
            if re_ == 0:
                return f"{im_s}i"
            sign = "+" if im > 0 else "-"
            mag = abs(im)
            mag_s = "" if mag == 1 else str(mag)
            return f"{re_}{sign}{mag_s}i"
        re_, im = a.real, a.imag
        if im == 0:
            return repr(re_)
        if re_ == 0:
            return f"{im!r}i"
        sign = "+" if im >= 0 else "-"
        return f"{re_!r}{sign}{abs(im)!r}i"

    def parse_scalar(self, text):
        s = text.strip().replace(" ", "")
        if not s:
            raise ParseError("empty scalar literal")
        try:
            if self.kind == "Q":
                return self._parse_rational(s)
            if self.kind == "GF":
                if not re.fullmatch(r"[+-]?\d+", s):
                    raise ParseError(f"bad GF({self.p}) literal {text!r}")
                return int(s) % self.p
            if self.kind == "Qi":
                re_, im = self._split_complex_literal(s)
                return (self._parse_rational(re_) if re_ else mpq(0),
                        self._parse_rational(im) if im is not None else mpq(0))
            re_, im = self._split_complex_literal(s)
            return complex(float(re_) if re_ else 0.0,
                           float(im) if im is not None else 0.0)
        except ParseError:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad scalar literal {text!r}: {exc}") from None

    @staticmethod
    def _parse_rational(s):
        if not _RATIONAL_RE.fullmatch(s):
            raise ParseError(f"bad rational literal {s!r}")
        if "/" in s:
            num, den = s.split("/")
            if int(den) == 0:
                raise ParseError(f"zero denominator in {s!r}")
            return mpq(int(num), int(den))
        return mpq(int(s))

    @staticmethod
    def _split_complex_literal(s):
        """Split 'a+bi' into (real part text, imag part text or None)."""
        if not s.endswith("i"):
            return s, None
        body = s[:-1]
        # find the split point: last top-level + or - not an exponent sign
        for pos in range(len(body) - 1, 0, -1):
            c = body[pos]
            if c in "+-" and body[pos - 1] not in "eE/+-":
                re_, im = body[:pos], body[pos:]
                if im in ("+", "-"):
                    im += "1"
                return re_, im
        return "", (body if body not in ("", "+", "-") else body + "1")


def involution_triple_holds(field, a, b):
    """The three involution identities: additivity, reversed
    multiplicativity, and being a self-inverse bijection."""
    c = field.conj
    ok_add = field.eq(c(field.add(a, b)), field.add(c(a), c(b)))
    ok_mul = field.eq(c(field.mul(a, b)), field.mul(c(b), c(a)))
    ok_inv = field.eq(c(c(a)), a)
    return ok_add and ok_mul and ok_inv
