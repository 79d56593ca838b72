"""Canonical forms of the regular part.

Similarity classes are complete over every exact field via the invariant
factors of xI - K (determinantal-divisor computation); over ComplexFloat the
Jordan data is recovered numerically at the field tolerance.

Congruence and *congruence classes of a nonsingular K are read off its
cosquare K^{-T} K, resp. *cosquare K^{-*} K: blocks at eigenvalue
(-1)^(n+1) of the cosquare are anti-triangular Gamma blocks, everything else
pairs up as lambda <-> 1/lambda (congruence) or mu <-> 1/conj(mu)
(*congruence, pairing across the unit circle).  The sign of a unit-circle
*congruence block is resolved only where an inertia computation settles it
(size-1 blocks on a diagonalizable unit eigenvalue); otherwise the sign is
reported unresolved, never guessed.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .bangle import SIM, assemble_decomposition, gamma, jordan
from .errors import (IllConditioned, InvariantViolation, SingularInput,
                     UnpairedEigenvalues)
from .matrix import Mat, _qrcp, _numeric_rank_from_r, is_nonsingular
from .poly import (p_add, p_deg, p_divmod, p_format, p_gcd, p_is_zero,
                   p_monic, p_mul, p_remove_factor, p_sub, p_to_numpy_roots,
                   p_trim, p_x_minus, squarefree_split)
from .regularize import regularize


# ---------------------------------------------------------------------------
# invariant factors (exact similarity classification)
# ---------------------------------------------------------------------------

def charmatrix(kmat):
    """xI - K as a grid of polynomials."""
    f = kmat.field
    n = kmat.rows
    grid = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(p_trim([f.neg(kmat.data[i][j]), f.one()], f))
            else:
                row.append(p_trim([f.neg(kmat.data[i][j])], f))
        grid.append(row)
    return grid


def _poly_minor_det(grid, rows, cols, f, memo):
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if not rows:
        det = p_trim([f.one()], f)
    else:
        det = ()
        i = rows[0]
        rest = rows[1:]
        for pos, j in enumerate(cols):
            entry = grid[i][j]
            if p_is_zero(entry):
                continue
            sub = _poly_minor_det(grid, rest, cols[:pos] + cols[pos + 1:], f, memo)
            term = p_mul(entry, sub, f)
            det = p_sub(det, term, f) if pos % 2 else p_add(det, term, f)
    memo[key] = det
    return det


def invariant_factors(kmat):
    """Nonconstant invariant factors of xI - K, monic, divisibility chain.

    Computed from determinantal divisors: d_k = gcd of all k x k minors,
    invariant factor i = d_i / d_{i-1}.  Complete similarity invariant over
    any exact field.
    """
    f = kmat.field
    n = kmat.rows
    if n == 0:
        return []
    grid = charmatrix(kmat)
    memo = {}
    divisors = [p_trim([f.one()], f)]
    idx = tuple(range(n))
    for k in range(1, n + 1):
        g = ()
        for rows in itertools.combinations(idx, k):
            for cols in itertools.combinations(idx, k):
                minor = _poly_minor_det(grid, rows, cols, f, memo)
                if p_is_zero(minor):
                    continue
                g = p_gcd(g, minor, f) if not p_is_zero(g) else p_monic(minor, f)
                if p_deg(g) == 0:
                    break
            if not p_is_zero(g) and p_deg(g) == 0:
                break
        if p_is_zero(g):
            raise InvariantViolation("characteristic matrix has zero determinant chain")
        divisors.append(g)
    factors = []
    for k in range(1, n + 1):
        q, r = p_divmod(divisors[k], divisors[k - 1], f)
        if not p_is_zero(r):
            raise InvariantViolation("determinantal divisors do not divide")
        if p_deg(q) >= 1:
            factors.append(p_monic(q, f))
    return factors


@dataclass
class SimilarityClass:
    """Complete similarity invariant: exact invariant factors, or numeric
    Jordan data (multiset of (eigenvalue, block size)) over ComplexFloat."""

    invariant_factors: tuple = ()     # tuples of coefficient strings
    jordan: tuple = ()                # sorted ((re, im), n) rounded pairs
    exact: bool = True

    def __eq__(self, other):
        if not isinstance(other, SimilarityClass):
            return NotImplemented
        if self.exact and other.exact:
            return self.invariant_factors == other.invariant_factors
        return _match_jordan(self.jordan, other.jordan)


def _match_jordan(a, b, tol=1e-6):
    if len(a) != len(b):
        return False
    used = [False] * len(b)
    for lam, n in a:
        hit = None
        for i, (mu, m) in enumerate(b):
            if used[i] or m != n:
                continue
            if abs(complex(*lam) - complex(*mu)) <= tol:
                hit = i
                break
        if hit is None:
            return False
        used[hit] = True
    return True


def similarity_invariants(kmat):
    """Similarity class of a square matrix; exact fields are unconditional,
    ComplexFloat uses the numeric eigenstructure at the field tolerance."""
    f = kmat.field
    if kmat.rows != kmat.cols:
        raise SingularInput("similarity invariants need a square matrix")
    if f.is_exact:
        facs = invariant_factors(kmat)
        sizes = sum(p_deg(p) for p in facs)
        if sizes != kmat.rows:
            raise InvariantViolation("invariant factor degrees do not sum up")
        return SimilarityClass(
            invariant_factors=tuple(p_format(p, f) for p in facs))
    blocks = numeric_jordan(kmat)
    jt = tuple(sorted(((round(l.real, 9), round(l.imag, 9)), n)
                      for l, n in blocks))
    return SimilarityClass(jordan=jt, exact=False)


# ---------------------------------------------------------------------------
# numeric Jordan structure
# ---------------------------------------------------------------------------

def _cluster_complex(values, tol):
    """Greedy union of eigenvalues within tol; returns [(center, count)]."""
    vals = sorted(values, key=lambda z: (z.real, z.imag))
    groups = []
    for v in vals:
        placed = False
        for g in groups:
            if abs(v - g[0] / g[1]) <= tol:
                g[0] += v
                g[1] += 1
                placed = True
                break
        if not placed:
            groups.append([v, 1])
    return [(g[0] / g[1], g[1]) for g in groups]


def _relative_rank(arr, rel):
    if arr.size == 0:
        return 0
    _, r, _ = _qrcp(arr)
    return _numeric_rank_from_r(np.diagonal(r), rel)


def _absolute_rank(arr, tol_abs):
    if arr.size == 0:
        return 0
    _, r, _ = _qrcp(arr)
    return int(np.sum(np.abs(np.diagonal(r)) > tol_abs))


def numeric_jordan(kmat, eps=None):
    """Jordan data of a ComplexFloat matrix: list of (eigenvalue, size)."""
    f = kmat.field
    eps = f.eps if eps is None else eps
    n = kmat.rows
    if n == 0:
        return []
    a = kmat.to_numpy()
    eigs = np.linalg.eigvals(a)
    scale = max(float(np.max(np.abs(eigs))), 1.0)
    tol = max(np.sqrt(eps) * scale, 100 * eps * scale)
    rel = max(np.sqrt(eps), 100 * eps)
    blocks = []
    for center, mult in _cluster_complex(list(eigs), tol):
        shifted = a - center * np.eye(n)
        # powers of the shifted matrix are compared against the original
        # scale: a pure-noise power must read as rank zero
        snorm = max(float(np.max(np.abs(shifted))), 1.0)
        ranks = [n]
        power = np.eye(n)
        for j in range(1, mult + 1):
            power = power @ shifted
            ranks.append(_absolute_rank(power, rel * snorm ** j))
            if n - ranks[-1] >= mult:
                break
        if n - ranks[-1] != mult:
            raise IllConditioned(
                f"eigenvalue cluster at {center:.6g} has ambiguous structure")
        counts = []
        for j in range(1, len(ranks)):
            ge_j = ranks[j - 1] - ranks[j]
            counts.append(ge_j)
        sizes = []
        for j in range(len(counts)):
            exactly = counts[j] - (counts[j + 1] if j + 1 < len(counts) else 0)
            if exactly < 0:
                raise IllConditioned("negative Jordan block count")
            sizes.extend([j + 1] * exactly)
        if sum(sizes) != mult:
            raise IllConditioned("Jordan sizes do not add up to multiplicity")
        blocks.extend((center, s) for s in sizes)
    return blocks


# ---------------------------------------------------------------------------
# cosquares and congruence classes
# ---------------------------------------------------------------------------

def cosquare(kmat):
    """K^{-T} K of a nonsingular matrix (no conjugation)."""
    if not is_nonsingular(kmat):
        raise SingularInput("cosquare needs a nonsingular matrix")
    return kmat.transpose().inverse() @ kmat


def star_cosquare(kmat):
    """K^{-*} K of a nonsingular matrix (field involution applied)."""
    if not is_nonsingular(kmat):
        raise SingularInput("*cosquare needs a nonsingular matrix")
    return kmat.conj_transpose().inverse() @ kmat


@dataclass(frozen=True)
class GammaBlock:
    n: int


@dataclass(frozen=True)
class HPair:
    n: int
    lam: complex        # representative with |lam| >= 1 (ties: Im >= 0)


@dataclass(frozen=True)
class UnitGamma:
    n: int
    lam: object         # complex, or None when the sign is unresolved
    unit: complex       # the *cosquare eigenvalue lam^2

    @property
    def resolved(self):
        return self.lam is not None


@dataclass
class CongruenceClassC:
    """Block multiset of a congruence or *congruence class.

    Exact inputs also carry the exact invariant factors of the (*)cosquare
    as a fingerprint, making equality decisions independent of numerics."""

    kind: str                   # "congruence" | "star"
    blocks: tuple
    fingerprint: tuple = ()     # exact invariant factor strings, or ()
    flags: tuple = ()

    def total_size(self):
        total = 0
        for b in self.blocks:
            total += 2 * b.n if isinstance(b, HPair) else b.n
        return total

    def __eq__(self, other):
        if not isinstance(other, CongruenceClassC):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.fingerprint and other.fingerprint:
            if self.fingerprint != other.fingerprint:
                return False
            return _blocks_match(self.blocks, other.blocks)
        return _blocks_match(self.blocks, other.blocks)


def _block_key(b):
    if isinstance(b, GammaBlock):
        return (0, b.n, 0.0, 0.0)
    if isinstance(b, UnitGamma):
        lam = b.lam if b.lam is not None else b.unit
        return (1, b.n, round(lam.real, 6), round(lam.imag, 6))
    return (2, b.n, round(b.lam.real, 6), round(b.lam.imag, 6))


def _blocks_match(a, b, tol=1e-5):
    if len(a) != len(b):
        return False
    sa = sorted(a, key=_block_key)
    sb = sorted(b, key=_block_key)
    for x, y in zip(sa, sb):
        if type(x) is not type(y):
            return False
        if isinstance(x, GammaBlock):
            if x.n != y.n:
                return False
        elif isinstance(x, HPair):
            if x.n != y.n or abs(x.lam - y.lam) > tol:
                return False
        else:
            if x.n != y.n or abs(x.unit - y.unit) > tol:
                return False
            if (x.lam is None) != (y.lam is None):
                return False
            if x.lam is not None and abs(x.lam - y.lam) > tol:
                return False
    return True


def _eigenblocks_exact(cmat):
    """(eigenvalue, size) data of an exact matrix: exact +-1 handling plus
    numeric roots of exact squarefree factors for the rest."""
    f = cmat.field
    facs = invariant_factors(cmat)
    blocks = []
    one = f.one()
    minus_one = f.neg(one)
    for p in facs:
        e_plus, p = p_remove_factor(p, p_x_minus(f, one), f)
        if e_plus:
            blocks.append((1 + 0j, e_plus, "exact"))
        e_minus, p = p_remove_factor(p, p_x_minus(f, minus_one), f)
        if e_minus:
            blocks.append((-1 + 0j, e_minus, "exact"))
        for mult, w in squarefree_split(p, f):
            for root in p_to_numpy_roots(w, f):
                blocks.append((complex(root), mult, "numeric"))
    return blocks, tuple(p_format(p, f) for p in facs)


def _eigenblocks(cmat):
    if cmat.field.is_exact:
        return _eigenblocks_exact(cmat)
    blocks = [(lam, n, "numeric") for lam, n in numeric_jordan(cmat)]
    return blocks, ()


def _pair_off(blocks, partner, self_paired, tol=1e-6):
    """Group (lam, n) blocks into pairs lam <-> partner(lam); entries where
    self_paired(lam) holds stay single.  Returns (singles, pairs)."""
    pool = list(blocks)
    singles, pairs = [], []
    while pool:
        lam, n, tag = pool.pop(0)
        if self_paired(lam):
            singles.append((lam, n, tag))
            continue
        mate = partner(lam)
        hit = None
        for i, (mu, m, _) in enumerate(pool):
            if m == n and abs(mu - mate) <= tol * max(1.0, abs(mate)):
                hit = i
                break
        if hit is None:
            raise UnpairedEigenvalues(
                f"eigenvalue {lam:.6g} (size {n}) lacks its partner")
        pool.pop(hit)
        rep = lam
        if abs(lam) < 1.0 or (abs(abs(lam) - 1.0) <= tol and lam.imag < 0):
            rep = mate
        pairs.append((rep, n))
    return singles, pairs


def congruence_canonical_c(kmat):
    """Congruence class data of a nonsingular matrix, read over C.

    Works on exact Q / Q(i) matrices (identity-involution view) and on
    ComplexFloat; the cosquare's Jordan blocks at (-1)^(n+1) become Gamma
    blocks, everything else pairs lambda <-> 1/lambda."""
    if kmat.field.kind == "GF":
        raise SingularInput("complex congruence classification needs Q, Q(i), or C")
    c = cosquare(kmat)
    blocks, fingerprint = _eigenblocks(c)
    tol = 1e-6
    gammas, rest = [], []
    for lam, n, tag in blocks:
        # the cosquare eigenvalue of Gamma_n is (-1)^(n+1)
        want = 1.0 if n % 2 == 1 else -1.0
        if abs(lam - want) <= tol:
            gammas.append(GammaBlock(n))
        else:
            rest.append((lam, n, tag))
    singles, pairs = _pair_off(rest, lambda lam: 1.0 / lam, lambda lam: False, tol)
    if singles:
        raise UnpairedEigenvalues("unpaired non-Gamma eigenvalues")
    hpairs = [HPair(n, _hpair_rep(lam)) for lam, n in pairs]
    cls = CongruenceClassC("congruence", tuple(gammas + hpairs), fingerprint)
    if cls.total_size() != kmat.rows:
        raise UnpairedEigenvalues("congruence blocks do not fill the matrix")
    return cls


def _hpair_rep(lam, tol=1e-9):
    """Normalize lambda vs 1/lambda: keep |lam| >= 1, ties by Im >= 0."""
    mate = 1.0 / lam
    if abs(lam) < abs(mate) - tol:
        lam = mate
    elif abs(abs(lam) - abs(mate)) <= tol and lam.imag < 0:
        lam = mate
    return complex(round(lam.real, 12), round(lam.imag, 12))


def star_congruence_canonical_c(kmat):
    """*congruence class data: HPairs off the unit circle plus unit-circle
    Gamma multiples, with signs resolved only on the safe subcase."""
    f = kmat.field
    if not f.conjugating:
        raise SingularInput("*congruence classification needs a conjugating field")
    c = star_cosquare(kmat)
    blocks, fingerprint = _eigenblocks(c)
    tol = 1e-6
    units, rest = [], []
    for lam, n, tag in blocks:
        if abs(abs(lam) - 1.0) <= tol:
            units.append((lam, n))
        else:
            rest.append((lam, n, tag))
    def partner(mu):
        return 1.0 / mu.conjugate()
    singles, pairs = _pair_off(rest, partner, lambda mu: False, tol)
    if singles:
        raise UnpairedEigenvalues("unpaired non-unit eigenvalues")
    hpairs = [HPair(n, _hpair_rep_star(mu)) for mu, n in pairs]
    unit_blocks, flags = _resolve_unit_signs(kmat, c, units, tol)
    cls = CongruenceClassC("star", tuple(unit_blocks + hpairs), fingerprint,
                           tuple(flags))
    if cls.total_size() != kmat.rows:
        raise UnpairedEigenvalues("*congruence blocks do not fill the matrix")
    return cls


def _hpair_rep_star(mu, tol=1e-9):
    mate = 1.0 / mu.conjugate()
    if abs(mu) < abs(mate) - tol:
        mu = mate
    return complex(round(mu.real, 12), round(mu.imag, 12))


def _resolve_unit_signs(kmat, cmat, units, tol):
    """Unit-circle blocks: size-1 blocks on a diagonalizable unit eigenvalue
    get signs from the inertia of the Hermitian compression of K onto the
    spectral subspace; everything else is reported unresolved."""
    out, flags = [], []
    groups = {}
    for lam, n in units:
        key = (round(lam.real, 6), round(lam.imag, 6))
        groups.setdefault(key, []).append((lam, n))
    kc = kmat.to_numpy()
    cc = cmat.to_numpy()
    n_total = kmat.rows
    for key, blist in sorted(groups.items()):
        u = sum(lam for lam, _ in blist) / len(blist)   # full precision
        u_out = complex(round(u.real, 12), round(u.imag, 12))
        sizes = [n for _, n in blist]
        if any(n > 1 for n in sizes):
            out.extend(UnitGamma(n, None, u_out) for _, n in blist)
            flags.append(f"unresolved sign for unit eigenvalue {u:.6g}")
            continue
        m = len(sizes)
        basis = _nullspace(cc - u * np.eye(n_total), m)
        if basis is None:
            out.extend(UnitGamma(n, None, u_out) for _, n in blist)
            flags.append(f"spectral subspace at {u:.6g} is ill-conditioned")
            continue
        comp = basis.conj().T @ kc @ basis
        mu = np.sqrt(u)
        herm = comp / mu
        asym = np.max(np.abs(herm - herm.conj().T)) if herm.size else 0.0
        scale = max(np.max(np.abs(herm)) if herm.size else 0.0, 1e-30)
        if asym > 1e-6 * scale:
            out.extend(UnitGamma(n, None, u_out) for _, n in blist)
            flags.append(f"compression at {u:.6g} is not Hermitian")
            continue
        herm = (herm + herm.conj().T) / 2.0
        eigs = np.linalg.eigvalsh(herm)
        pos = int(np.sum(eigs > 0))
        neg = int(np.sum(eigs < 0))
        if pos + neg != m:
            raise IllConditioned(f"degenerate inertia at unit eigenvalue {u:.6g}")
        mu = complex(mu)
        out.extend(UnitGamma(1, complex(round(mu.real, 12), round(mu.imag, 12)), u_out)
                   for _ in range(pos))
        neg_mu = -mu
        out.extend(UnitGamma(1, complex(round(neg_mu.real, 12), round(neg_mu.imag, 12)), u_out)
                   for _ in range(neg))
    return out, flags


def _nullspace(arr, expected_dim, rel=1e-8):
    """Orthonormal basis of the (numerical) nullspace, or None if its
    dimension disagrees with the expectation."""
    n = arr.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    u, s, vh = np.linalg.svd(arr)
    scale = max(s[0] if len(s) else 0.0, 1.0)
    dim = int(np.sum(s <= 1e-8 * scale))
    if dim != expected_dim:
        return None
    return vh.conj().T[:, n - expected_dim:]


# ---------------------------------------------------------------------------
# canonical bangles
# ---------------------------------------------------------------------------

def companion(field, poly):
    """Companion matrix of a monic polynomial (ascending coefficients)."""
    n = p_deg(poly)
    c = Mat.zeros(field, n, n)
    for i in range(n - 1):
        c.data[i + 1][i] = field.one()
    for i in range(n):
        c.data[i][n - 1] = field.neg(poly[i])
    return c


def frobenius_form(kmat):
    """Direct sum of companion blocks of the invariant factors."""
    f = kmat.field
    out = Mat.zeros(f, 0, 0)
    for p in invariant_factors(kmat):
        out = out.direct_sum(companion(f, p))
    return out


def _hpair_mat(field, n, lam):
    """[[0, I], [J_n(lam), 0]]."""
    m = Mat.zeros(field, 2 * n, 2 * n)
    one = field.one()
    for i in range(n):
        m.data[i][n + i] = one
    jb = jordan(field, n, lam)
    for i in range(n):
        for j in range(n):
            m.data[n + i][j] = jb.data[i][j]
    return m


def _scalar_from_complex(field, z):
    if field.kind == "C":
        return complex(z)
    raise InvariantViolation("complex block values need the ComplexFloat field")


def _jordan_regular(field, blocks):
    out = Mat.zeros(field, 0, 0)
    for lam, n in sorted(blocks, key=lambda b: (round(b[0].real, 9),
                                                round(b[0].imag, 9), b[1])):
        out = out.direct_sum(jordan(field, n, _scalar_from_complex(field, lam)))
    return out


def _congruence_regular(field, cls):
    out = Mat.zeros(field, 0, 0)
    for b in sorted(cls.blocks, key=_block_key):
        if isinstance(b, GammaBlock):
            out = out.direct_sum(gamma(field, b.n))
        elif isinstance(b, HPair):
            out = out.direct_sum(_hpair_mat(field, b.n,
                                            _scalar_from_complex(field, b.lam)))
        else:
            blk = gamma(field, b.n).scale(_scalar_from_complex(field, b.lam))
            out = out.direct_sum(blk)
    return out


def _exact_pm_one_regular(field, cls):
    """Exact Gamma / HPair(+-1) assembly; only valid when every block value
    lies in the field (here: all eigenvalues +-1)."""
    out = Mat.zeros(field, 0, 0)
    for b in sorted(cls.blocks, key=_block_key):
        if isinstance(b, GammaBlock):
            out = out.direct_sum(gamma(field, b.n))
        else:
            val = field.one() if b.lam.real > 0 else field.neg(field.one())
            out = out.direct_sum(_hpair_mat(field, b.n, val))
    return out


@dataclass
class CanonicalReport:
    mode: str
    replaced: bool                     # regular part rewritten in block form
    flags: tuple
    summands: tuple
    regular_similarity: object = None  # SimilarityClass (sim mode)
    regular_congruence: object = None  # CongruenceClassC (star mode, non-GF)
    cosquare_similarity: object = None # GF star fallback descriptor
    witness: object = None             # regularization witness

    def descriptor(self):
        reg = None
        if self.regular_similarity is not None:
            reg = ("sim", self.regular_similarity)
        if self.regular_congruence is not None:
            reg = ("cong", self.regular_congruence)
        if self.cosquare_similarity is not None:
            reg = ("cosq", self.cosquare_similarity)
        return (tuple(sorted(self.summands)), reg)


def canonical_bangle(bangle, mode):
    """Regularize, then rewrite the regular part in canonical block form
    where the theory licenses it; anything unresolved keeps the computed
    regular part and is flagged, never guessed."""
    dec = regularize(bangle, mode)
    f = bangle.field
    kmat = dec.regular
    flags = []
    replaced = False
    k_out = kmat
    report = CanonicalReport(mode, False, (), dec.singular, witness=dec.witness)
    if mode == SIM:
        report.regular_similarity = similarity_invariants(kmat)
        if f.is_exact:
            k_out = frobenius_form(kmat)
            replaced = True
            flags.append("regular part emitted as Frobenius companion "
                         "blocks (exact-field extension of the Jordan form)")
        else:
            blocks = numeric_jordan(kmat)
            if any(abs(lam) <= 1e-8 for lam, _ in blocks):
                raise IllConditioned("regular part has a near-zero eigenvalue")
            k_out = _jordan_regular(f, blocks)
            replaced = True
    else:
        if f.kind == "GF":
            report.cosquare_similarity = (similarity_invariants(cosquare(kmat))
                                          if kmat.rows else SimilarityClass())
            flags.append("no complex canonical blocks over GF(p); regular "
                         "part kept, cosquare invariants reported")
        elif f.conjugating:
            cls = star_congruence_canonical_c(kmat)
            report.regular_congruence = cls
            flags.extend(cls.flags)
            unresolved = any(isinstance(b, UnitGamma) and not b.resolved
                             for b in cls.blocks)
            if not f.is_exact and not unresolved:
                k_out = _congruence_regular(f, cls)
                replaced = True
            elif f.is_exact:
                flags.append("exact *congruence: regular part kept, class "
                             "reported by *cosquare invariants and resolved signs")
        else:
            cls = congruence_canonical_c(kmat)
            report.regular_congruence = cls
            if not f.is_exact:
                k_out = _congruence_regular(f, cls)
                replaced = True
            else:
                exact_ok = all(isinstance(b, GammaBlock)
                               or abs(abs(b.lam.real) - 1.0) <= 1e-9
                               and abs(b.lam.imag) <= 1e-9
                               for b in cls.blocks)
                if exact_ok:
                    k_out = _exact_pm_one_regular(f, cls)
                    replaced = True
                else:
                    flags.append("congruence class has eigenvalues outside "
                                 "the exact field; regular part kept")
    report.replaced = replaced
    report.flags = tuple(flags)
    out = assemble_decomposition(f, k_out, dec.singular, dec.t, dec.boxed)
    return out, report
