"""Dense matrices over a ScalarField.

Empty shapes follow the usual conventions for degenerate sizes: for every n
there is exactly one matrix of size n-by-0 and one of size 0-by-n, they act
as zero maps, and 0_{p0} (+) 0_{0q} = 0_{pq} under the direct sum.

Exact fields get Gauss-Jordan elimination with deterministic pivoting (first
nonzero entry in index order).  ComplexFloat gets reflector-based
rank-revealing triangularization with column pivoting; an SVD is used only in
test oracles, never here.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, SingularMatrix


class Mat:
    """Immutable-by-convention dense matrix (row-major list of lists)."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data):
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = data
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ShapeMismatch(f"data does not match shape {rows}x{cols}")

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zeros(field, rows, cols):
        z = field.zero()
        return Mat(field, rows, cols, [[z] * cols for _ in range(rows)])

    @staticmethod
    def identity(field, n):
        z, o = field.zero(), field.one()
        data = [[o if i == j else z for j in range(n)] for i in range(n)]
        return Mat(field, n, n, data)

    @staticmethod
    def from_rows(field, rows_of_scalars):
        rows = len(rows_of_scalars)
        cols = len(rows_of_scalars[0]) if rows else 0
        return Mat(field, rows, cols, [list(r) for r in rows_of_scalars])

    @staticmethod
    def from_int_rows(field, rows_of_ints, cols=None):
        rows = len(rows_of_ints)
        if cols is None:
            cols = len(rows_of_ints[0]) if rows else 0
        data = [[field.from_int(x) for x in r] for r in rows_of_ints]
        return Mat(field, rows, cols, data)

    @staticmethod
    def from_numpy(field, arr):
        arr = np.asarray(arr)
        return Mat(field, arr.shape[0], arr.shape[1],
                   [[complex(x) for x in row] for row in arr])

    def to_numpy(self):
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            row = self.data[i]
            for j in range(self.cols):
                out[i, j] = self.field.to_complex(row[j])
        return out

    # ---- basics ------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def copy(self):
        return Mat(self.field, self.rows, self.cols, [list(r) for r in self.data])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        if self.shape != other.shape or self.field != other.field:
            return False
        eq = self.field.eq
        return all(eq(a, b) for ra, rb in zip(self.data, other.data)
                   for a, b in zip(ra, rb))

    def __hash__(self):
        return hash((self.rows, self.cols,
                     tuple(self.field.format_scalar(x) for r in self.data for x in r)))

    def __repr__(self):
        if self.rows == 0 or self.cols == 0:
            return f"Mat({self.rows}x{self.cols})"
        body = "; ".join(" ".join(self.field.format_scalar(x) for x in r)
                         for r in self.data)
        return f"Mat[{body}]"

    def max_abs(self):
        """Largest entry magnitude as a float (0.0 for empty matrices)."""
        best = 0.0
        for row in self.data:
            for x in row:
                v = abs(self.field.to_complex(x)) if self.field.kind != "GF" else float(x != 0)
                if v > best:
                    best = v
        return best

    def is_zero(self, scale=None):
        f = self.field
        if f.kind == "C" and scale is None:
            scale = max(self.max_abs(), 1.0)
        return all(f.is_zero(x, scale) for row in self.data for x in row)

    # ---- arithmetic ----------------------------------------------------

    def add(self, other):
        self._same_shape(other)
        f = self.field
        return Mat(f, self.rows, self.cols,
                   [[f.add(a, b) for a, b in zip(ra, rb)]
                    for ra, rb in zip(self.data, other.data)])

    def sub(self, other):
        self._same_shape(other)
        f = self.field
        return Mat(f, self.rows, self.cols,
                   [[f.sub(a, b) for a, b in zip(ra, rb)]
                    for ra, rb in zip(self.data, other.data)])

    def neg(self):
        f = self.field
        return Mat(f, self.rows, self.cols,
                   [[f.neg(a) for a in r] for r in self.data])

    def scale(self, c):
        f = self.field
        return Mat(f, self.rows, self.cols,
                   [[f.mul(c, a) for a in r] for r in self.data])

    def mul(self, other):
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        f = self.field
        if f.kind == "C" and self.rows and self.cols and other.cols:
            return Mat.from_numpy(f, self.to_numpy() @ other.to_numpy())
        z = f.zero()
        add, mul, eq = f.add, f.mul, f.eq
        out = [[z] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            ai, ci = self.data[i], out[i]
            for k in range(self.cols):
                a = ai[k]
                if eq(a, z):
                    continue
                bk = other.data[k]
                for j in range(other.cols):
                    b = bk[j]
                    if not eq(b, z):
                        ci[j] = add(ci[j], mul(a, b))
        return Mat(f, self.rows, other.cols, out)

    def __matmul__(self, other):
        return self.mul(other)

    def transpose(self):
        return Mat(self.field, self.cols, self.rows,
                   [[self.data[i][j] for i in range(self.rows)]
                    for j in range(self.cols)])

    def conj_transpose(self):
        f = self.field
        return Mat(f, self.cols, self.rows,
                   [[f.conj(self.data[i][j]) for i in range(self.rows)]
                    for j in range(self.cols)])

    def conj(self):
        f = self.field
        return Mat(f, self.rows, self.cols, [[f.conj(a) for a in r] for r in self.data])

    # ---- assembly ----------------------------------------------------------

    def block(self, r0, r1, c0, c1):
        return Mat(self.field, r1 - r0, c1 - c0,
                   [row[c0:c1] for row in self.data[r0:r1]])

    def take_rows(self, idx):
        return Mat(self.field, len(idx), self.cols, [list(self.data[i]) for i in idx])

    def take_cols(self, idx):
        return Mat(self.field, self.rows, len(idx),
                   [[row[j] for j in idx] for row in self.data])

    @staticmethod
    def hstack(field, mats):
        mats = list(mats)
        if not mats:
            return Mat.zeros(field, 0, 0)
        rows = mats[0].rows
        if any(m.rows != rows for m in mats):
            raise ShapeMismatch("hstack: row counts differ")
        data = [sum((list(m.data[i]) for m in mats), []) for i in range(rows)]
        return Mat(field, rows, sum(m.cols for m in mats), data)

    @staticmethod
    def vstack(field, mats):
        mats = list(mats)
        if not mats:
            return Mat.zeros(field, 0, 0)
        cols = mats[0].cols
        if any(m.cols != cols for m in mats):
            raise ShapeMismatch("vstack: column counts differ")
        data = [list(r) for m in mats for r in m.data]
        return Mat(field, len(data), cols, data)

    def direct_sum(self, other):
        """A (+) B; appending 0_{m0} adds m zero rows, 0_{0n} adds n zero columns."""
        f = self.field
        top = Mat.hstack(f, [self, Mat.zeros(f, self.rows, other.cols)])
        bot = Mat.hstack(f, [Mat.zeros(f, other.rows, self.cols), other])
        return Mat.vstack(f, [top, bot])

    def with_entry(self, i, j, value):
        m = self.copy()
        m.data[i][j] = value
        return m

    # ---- inversion and solving -------------------------------------------

    def inverse(self):
        if self.rows != self.cols:
            raise ShapeMismatch("inverse needs a square matrix")
        f = self.field
        n = self.rows
        if n == 0:
            return Mat.zeros(f, 0, 0)
        if f.kind == "C":
            a = self.to_numpy()
            try:
                inv = np.linalg.inv(a)
            except np.linalg.LinAlgError:
                raise SingularMatrix("matrix is numerically singular") from None
            return Mat.from_numpy(f, inv)
        m = [list(r) for r in self.data]
        e = [[f.one() if i == j else f.zero() for j in range(n)] for i in range(n)]
        z = f.zero()
        for c in range(n):
            piv = None
            for i in range(c, n):
                if not f.eq(m[i][c], z):
                    piv = i
                    break
            if piv is None:
                raise SingularMatrix("matrix is singular")
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                e[c], e[piv] = e[piv], e[c]
            s = f.inv(m[c][c])
            m[c] = [f.mul(s, x) for x in m[c]]
            e[c] = [f.mul(s, x) for x in e[c]]
            for i in range(n):
                if i == c:
                    continue
                t = m[i][c]
                if f.eq(t, z):
                    continue
                m[i] = [f.sub(x, f.mul(t, y)) for x, y in zip(m[i], m[c])]
                e[i] = [f.sub(x, f.mul(t, y)) for x, y in zip(e[i], e[c])]
        return Mat(f, n, n, e)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes {self.shape} and {other.shape} differ")


def mats_close(a, b, tol):
    """Entrywise closeness for float fields (exact fields: equality)."""
    if a.shape != b.shape:
        return False
    if a.field.is_exact:
        return a == b
    if a.rows == 0 or a.cols == 0:
        return True
    return bool(np.max(np.abs(a.to_numpy() - b.to_numpy())) <= tol)


@dataclass
class RankRevelation:
    """left * A * right has the requested pivot shape; both transforms are
    nonsingular (unitary within tolerance in unitary mode)."""

    rank: int
    left: Mat
    right: Mat
    mode: str  # "exact" | "unitary"


# ---------------------------------------------------------------------------
# exact elimination
# ---------------------------------------------------------------------------

def _exact_rref(mat):
    """Reduced row echelon form with recorded row transform.

    Returns (E, R, pivot_cols) with E*mat == R.  Pivoting is deterministic:
    first nonzero entry scanning rows in index order.
    """
    f = mat.field
    m, n = mat.rows, mat.cols
    z = f.zero()
    rdata = [list(r) for r in mat.data]
    edata = [[f.one() if i == j else z for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if not f.eq(rdata[i][c], z):
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            rdata[r], rdata[piv] = rdata[piv], rdata[r]
            edata[r], edata[piv] = edata[piv], edata[r]
        s = f.inv(rdata[r][c])
        if not f.eq(s, f.one()):
            rdata[r] = [f.mul(s, x) for x in rdata[r]]
            edata[r] = [f.mul(s, x) for x in edata[r]]
        for i in range(m):
            if i == r:
                continue
            t = rdata[i][c]
            if f.eq(t, z):
                continue
            rdata[i] = [f.sub(x, f.mul(t, y)) for x, y in zip(rdata[i], rdata[r])]
            edata[i] = [f.sub(x, f.mul(t, y)) for x, y in zip(edata[i], edata[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return Mat(f, m, m, edata), Mat(f, m, n, rdata), pivots


def exact_rank(mat):
    _, _, pivots = _exact_rref(mat)
    return len(pivots)


def _perm_mat(field, perm):
    """Permutation matrix P with (x P)[new] = x[old]: P[old][new] = 1."""
    n = len(perm)
    p = Mat.zeros(field, n, n)
    for new, old in enumerate(perm):
        p.data[old][new] = field.one()
    return p


def exact_rank_reveal(mat, corner="br"):
    """Nonsingular E, T with E*mat*T == [[0,0],[0,I_r]] ("br") or
    [[0,I_r],[0,0]] ("tr"); the identity occupies the last r columns."""
    f = mat.field
    m, n = mat.rows, mat.cols
    e0, r0, pivots = _exact_rref(mat)
    r = len(pivots)
    z = f.zero()
    # clear non-pivot columns using the unit pivot columns
    tdata = [[f.one() if i == j else z for j in range(n)] for i in range(n)]
    rdata = [list(row) for row in r0.data]
    pivset = set(pivots)
    for c in range(n):
        if c in pivset:
            continue
        for i, pc in enumerate(pivots):
            if pc > c:
                break
            coef = rdata[i][c]
            if f.eq(coef, z):
                continue
            for row in rdata:
                row[c] = f.sub(row[c], f.mul(coef, row[pc]))
            for trow in tdata:
                trow[c] = f.sub(trow[c], f.mul(coef, trow[pc]))
    # move pivot columns, in order, to the last r slots
    nonpiv = [c for c in range(n) if c not in pivset]
    order = nonpiv + pivots
    t = Mat(f, n, n, tdata) @ _perm_mat(f, order)
    if corner == "br":
        row_order = list(range(r, m)) + list(range(r))
        e = Mat(f, m, m, [e0.data[i] for i in row_order])
    elif corner == "tr":
        e = e0
    else:
        raise ValueError(f"unknown corner {corner!r}")
    return r, e, t


def exact_row_compress(mat, zeros_at="top"):
    """Nonsingular E with E*mat having its nonzero (independent) rows packed
    at the bottom (zeros_at="top") or top (zeros_at="bottom")."""
    e0, _, pivots = _exact_rref(mat)
    r = len(pivots)
    m = mat.rows
    if zeros_at == "bottom":
        return r, e0
    if zeros_at != "top":
        raise ValueError(f"unknown zeros_at {zeros_at!r}")
    row_order = list(range(r, m)) + list(range(r))
    return r, Mat(mat.field, m, m, [e0.data[i] for i in row_order])


def solve_right(a, b):
    """Any X with a*X == b, for a of full row rank (raises otherwise)."""
    f = a.field
    if a.rows != b.rows:
        raise ShapeMismatch("solve_right: row counts differ")
    if f.kind == "C":
        if a.rows == 0 or a.cols == 0:
            if a.rows and not b.is_zero():
                raise SingularMatrix("inconsistent system")
            return Mat.zeros(f, a.cols, b.cols)
        x, _, rank, _ = np.linalg.lstsq(a.to_numpy(), b.to_numpy(), rcond=None)
        return Mat.from_numpy(f, x)
    e, r, pivots = _exact_rref(a)
    if len(pivots) != a.rows:
        raise SingularMatrix("solve_right needs full row rank")
    c = e @ b
    x = Mat.zeros(f, a.cols, b.cols)
    for i, pc in enumerate(pivots):
        x.data[pc] = list(c.data[i])
    return x


# ---------------------------------------------------------------------------
# unitary (ComplexFloat) factorizations
# ---------------------------------------------------------------------------

def _qrcp(a):
    """Householder QR with column pivoting: a[:, perm] == q @ r."""
    a = np.array(a, dtype=complex)
    m, n = a.shape
    q = np.eye(m, dtype=complex)
    perm = np.arange(n)
    for k in range(min(m, n)):
        norms = np.sqrt(np.sum(np.abs(a[k:, k:]) ** 2, axis=0))
        if norms.size == 0 or np.max(norms) == 0.0:
            break
        j = int(np.argmax(norms)) + k
        if j != k:
            a[:, [k, j]] = a[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
        x = a[k:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        a[k:, k:] -= 2.0 * np.outer(v, v.conj() @ a[k:, k:])
        q[:, k:] -= 2.0 * np.outer(q[:, k:] @ v, v.conj())
        a[k + 1:, k] = 0.0
    return q, a, perm


def _qr_plain(a):
    """Householder QR without pivoting: a == q @ r."""
    a = np.array(a, dtype=complex)
    m, n = a.shape
    q = np.eye(m, dtype=complex)
    for k in range(min(m, n)):
        x = a[k:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        a[k:, k:] -= 2.0 * np.outer(v, v.conj() @ a[k:, k:])
        q[:, k:] -= 2.0 * np.outer(q[:, k:] @ v, v.conj())
        a[k + 1:, k] = 0.0
    return q, a


def _numeric_rank_from_r(r_diag, eps, floor=0.0):
    """Count pivots above both the relative cutoff and an absolute floor.

    The floor lets callers anchor the decision to the scale of the problem
    they are solving, so blocks made of pure cancellation dust read as rank
    zero even though their own largest entry would pass a relative test."""
    if len(r_diag) == 0:
        return 0
    mags = np.abs(np.asarray(r_diag))
    top = np.max(mags)
    if top <= floor:
        return 0
    return int(np.sum(mags > max(eps * top, floor)))


def numeric_rank(mat, eps=None, floor=0.0):
    """Numerical rank via column-pivoted reflectors at tolerance eps."""
    f = mat.field
    eps = f.eps if eps is None else eps
    if mat.rows == 0 or mat.cols == 0:
        return 0
    _, r, _ = _qrcp(mat.to_numpy())
    d = np.diagonal(r)
    return _numeric_rank_from_r(d, eps, floor)


def _unitary_corner_reveal(mat, eps=None, corner="br", floor=0.0):
    """Unitary E, T and rank r with E*mat*T == [[0,0],[0,H_r]] up to
    eps-level residue; H_r is the nonsingular r-by-r pivot block.

    corner "tr" puts the H block in the top-right instead.
    """
    f = mat.field
    if f.kind != "C":
        raise ValueError("unitary_rank_reveal needs a ComplexFloat matrix")
    eps = f.eps if eps is None else eps
    m, n = mat.rows, mat.cols
    if m == 0 or n == 0:
        return 0, Mat.identity(f, m), Mat.identity(f, n)
    a = mat.to_numpy()
    q, rmat, perm = _qrcp(a)
    r = _numeric_rank_from_r(np.diagonal(rmat), eps, floor)
    pi = np.zeros((n, n), dtype=complex)
    for new, old in enumerate(perm):
        pi[old, new] = 1.0
    left = q.conj().T
    if r == 0:
        right = pi
    else:
        x = rmat[:r, :]                      # r x n, full row rank
        q2, _ = _qr_plain(x.conj().T)        # x = (r2^H) q2^H
        w = q2[:, ::-1]                      # column flip: x @ w == [0 | H]
        right = pi @ w
    if corner == "br":
        row_order = list(range(r, m)) + list(range(r))
        left = left[row_order, :]
    elif corner != "tr":
        raise ValueError(f"unknown corner {corner!r}")
    return r, Mat.from_numpy(f, left), Mat.from_numpy(f, right)


def unitary_rank_reveal(mat, eps=None, corner="br", floor=0.0):
    """Rank revelation by reflectors with column pivoting; both transforms
    are unitary and the pivot block H_r is nonsingular."""
    r, e, t = _unitary_corner_reveal(mat, eps, corner, floor)
    return RankRevelation(r, e, t, "unitary")


def unitary_row_compress(mat, eps=None, zeros_at="top", floor=0.0):
    """Unitary E with E*mat row-compressed: r independent rows packed at the
    bottom (zeros_at="top") or top (zeros_at="bottom"), eps-level residue."""
    f = mat.field
    eps = f.eps if eps is None else eps
    m = mat.rows
    if m == 0 or mat.cols == 0:
        return 0, Mat.identity(f, m)
    q, rmat, _ = _qrcp(mat.to_numpy())
    r = _numeric_rank_from_r(np.diagonal(rmat), eps, floor)
    left = q.conj().T
    if zeros_at == "top":
        row_order = list(range(r, m)) + list(range(r))
        left = left[row_order, :]
    elif zeros_at != "bottom":
        raise ValueError(f"unknown zeros_at {zeros_at!r}")
    return r, Mat.from_numpy(f, left)


# ---------------------------------------------------------------------------
# rank-revelation entry points
# ---------------------------------------------------------------------------

def column_echelon_in_strip(mat, corner="br", floor=0.0):
    """Rank revelation used by the strip staircases.

    Exact fields: Gauss-Jordan, the pivot block is exactly I_r.  ComplexFloat:
    unitary transforms with a nonsingular pivot block H_r (callers normalize
    H_r to I_r afterwards with a free column operation); `floor` anchors the
    rank decision to the caller's problem scale.
    """
    if mat.field.kind == "C":
        return unitary_rank_reveal(mat, corner=corner, floor=floor)
    r, e, t = exact_rank_reveal(mat, corner=corner)
    return RankRevelation(r, e, t, "exact")


def row_compress(mat, zeros_at="top", floor=0.0):
    """Row-space compression (the row-side dual of the strip echelon)."""
    if mat.field.kind == "C":
        r, e = unitary_row_compress(mat, zeros_at=zeros_at, floor=floor)
    else:
        r, e = exact_row_compress(mat, zeros_at=zeros_at)
    return r, e


def rank(mat):
    if mat.field.kind == "C":
        return numeric_rank(mat)
    return exact_rank(mat)


def is_nonsingular(mat):
    return mat.rows == mat.cols and rank(mat) == mat.rows
