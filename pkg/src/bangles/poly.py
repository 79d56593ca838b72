"""Dense univariate polynomials over a ScalarField (ascending coefficients).

Just enough ring machinery for invariant factors and squarefree splitting:
trimmed tuples of scalars, Euclidean division by a monic-normalized divisor,
monic gcd, derivatives.  The zero polynomial is the empty tuple.
"""

from .errors import DivisionByZero


def p_trim(cs, f):
    cs = list(cs)
    while cs and f.eq(cs[-1], f.zero()):
        cs.pop()
    return tuple(cs)


def p_zero():
    return ()


def p_const(f, c):
    return p_trim([c], f)


def p_x_minus(f, c):
    return p_trim([f.neg(c), f.one()], f)


def p_deg(p):
    return len(p) - 1


def p_is_zero(p):
    return len(p) == 0


def p_add(a, b, f):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else f.zero()
        y = b[i] if i < len(b) else f.zero()
        out.append(f.add(x, y))
    return p_trim(out, f)


def p_sub(a, b, f):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else f.zero()
        y = b[i] if i < len(b) else f.zero()
        out.append(f.sub(x, y))
    return p_trim(out, f)


def p_mul(a, b, f):
    if not a or not b:
        return ()
    out = [f.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if f.eq(x, f.zero()):
            continue
        for j, y in enumerate(b):
            out[i + j] = f.add(out[i + j], f.mul(x, y))
    return p_trim(out, f)


def p_scale(a, c, f):
    return p_trim([f.mul(c, x) for x in a], f)


def p_divmod(a, b, f):
    if p_is_zero(b):
        raise DivisionByZero("polynomial division by zero")
    q = [f.zero()] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    inv_lead = f.inv(b[-1])
    while len(r) >= len(b) and r:
        if f.eq(r[-1], f.zero()):
            r.pop()
            continue
        k = len(r) - len(b)
        c = f.mul(r[-1], inv_lead)
        q[k] = c
        for i, y in enumerate(b):
            r[k + i] = f.sub(r[k + i], f.mul(c, y))
        r.pop()
    return p_trim(q, f), p_trim(r, f)


def p_monic(a, f):
    if p_is_zero(a):
        return a
    inv_lead = f.inv(a[-1])
    if f.eq(inv_lead, f.one()):
        return a
    return p_scale(a, inv_lead, f)


def p_gcd(a, b, f):
    a, b = p_trim(a, f), p_trim(b, f)
    while not p_is_zero(b):
        _, r = p_divmod(a, b, f)
        a, b = b, r
    return p_monic(a, f)


def p_deriv(a, f):
    out = []
    for i in range(1, len(a)):
        c = a[i]
        k = f.from_int(i)
        out.append(f.mul(k, c))
    return p_trim(out, f)


def p_divides(a, b, f):
    """Does a divide b exactly?"""
    if p_is_zero(a):
        return p_is_zero(b)
    _, r = p_divmod(b, a, f)
    return p_is_zero(r)


def p_remove_factor(a, fac, f):
    """Largest e with fac^e | a; returns (e, a / fac^e)."""
    e = 0
    while True:
        q, r = p_divmod(a, fac, f)
        if not p_is_zero(r) or p_is_zero(q):
            return e, a
        a = q
        e += 1


def squarefree_split(a, f):
    """Multiplicity filtration over a characteristic-zero field.

    Returns [(j, w_j)] with a = prod w_j^j (monic w_j squarefree, pairwise
    coprime), omitting trivial w_j."""
    a = p_monic(a, f)
    if p_deg(a) < 1:
        return []
    parts = []
    g = p_gcd(a, p_deriv(a, f), f)
    w, _ = p_divmod(a, g, f)            # product of distinct roots
    j = 1
    while p_deg(w) >= 1:
        y = p_gcd(w, g, f)              # roots of multiplicity > j
        factor, _ = p_divmod(w, y, f)   # roots of multiplicity exactly j
        if p_deg(factor) >= 1:
            parts.append((j, p_monic(factor, f)))
        w = y
        g, _ = p_divmod(g, y, f)
        j += 1
    return parts


def p_format(a, f):
    if p_is_zero(a):
        return "0"
    return ",".join(f.format_scalar(c) for c in a)


def p_to_numpy_roots(a, f):
    """Roots of an exact-coefficient polynomial, computed numerically."""
    import numpy as np
    if p_deg(a) < 1:
        return []
    coeffs = [f.to_complex(c) for c in reversed(a)]
    return list(np.roots(np.array(coeffs, dtype=complex)))
