"""Fraction-free exact linear algebra over rational function fields.

Rank and kernel work on matrices of :class:`RationalElement` entries.  Each
row is first scaled by the least common multiple of its denominators (row
scaling changes neither rank nor right kernel), producing a polynomial
matrix that Bareiss single-step elimination keeps fraction-free: every
intermediate entry is a minor determinant and each division is exact.

Pivoting is deterministic (first nonzero entry in row-major scan column by
column) so the echelonized kernel bases, and hence all certificates built
from them, are reproducible.

``kernel_mod_p`` is the small dense mod-p solver used by the bounded
annihilator oracle; the systems there have scalar entries, so numpy
row operations carry the elimination.
"""

import numpy as np

from .errors import BadParameterError
from .poly import Poly, exact_div
from .rational import RationalElement, common_denominator


class FFMatrix:
    """A rectangular matrix of canonical RationalElement entries."""

    def __init__(self, p, rows, row_labels=None, col_labels=None):
        self.p = p
        self.rows = [list(r) for r in rows]
        ncols = {len(r) for r in self.rows}
        if len(ncols) > 1:
            raise BadParameterError("ragged matrix")
        self.nrows = len(self.rows)
        self.ncols = ncols.pop() if ncols else 0
        self.row_labels = list(row_labels) if row_labels else None
        self.col_labels = list(col_labels) if col_labels else None

    def entry(self, i, j):
        return self.rows[i][j]

    def transpose(self):
        rows = [
            [self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)
        ]
        return FFMatrix(self.p, rows, row_labels=self.col_labels, col_labels=self.row_labels)

    def __repr__(self):
        return f"FFMatrix({self.nrows}x{self.ncols} over F_{self.p})"


def _clear_rows(matrix):
    """Per-row common denominators: polynomial rows spanning the same space."""
    p = matrix.p
    out = []
    for row in matrix.rows:
        if all(e.is_zero() for e in row):
            out.append([Poly.zero(p) for _ in row])
            continue
        h = common_denominator([e for e in row if not e.is_zero()])
        cleared = []
        for e in row:
            if e.is_zero():
                cleared.append(Poly.zero(p))
            else:
                cleared.append(e.num * exact_div(h, e.den))
        out.append(cleared)
    return out


def _bareiss(matrix):
    """Fraction-free row echelon form.

    Returns (rows, pivots) where pivots is a list of (row, col) positions in
    increasing row and column order.
    """
    rows = _clear_rows(matrix)
    nrows, ncols = matrix.nrows, matrix.ncols
    p = matrix.p
    prev = Poly.one(p)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pivot_row = None
        for i in range(r, nrows):
            if not rows[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            if all(rows[i][j].is_zero() for j in range(c, ncols)):
                continue
            head = rows[i][c]
            for j in range(c + 1, ncols):
                rows[i][j] = exact_div(piv * rows[i][j] - head * rows[r][j], prev)
            rows[i][c] = Poly.zero(p)
        prev = piv
        pivots.append((r, c))
        r += 1
    return rows, pivots


def rank(matrix):
    """Rank over the rational function field."""
    _, pivots = _bareiss(matrix)
    return len(pivots)


def kernel(matrix):
    """Echelonized basis of the right kernel; every vector re-verified.

    Each basis vector has entry 1 at its free column and 0 at the other free
    columns; pivot coordinates come from back substitution in the field.
    """
    p = matrix.p
    rows, pivots = _bareiss(matrix)
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(matrix.ncols) if c not in pivot_cols]
    basis = []
    zero = RationalElement.zero(p)
    one = RationalElement.one(p)
    for fc in free_cols:
        v = [zero] * matrix.ncols
        v[fc] = one
        for r, c in reversed(pivots):
            if c > fc:
                continue
            s = zero
            for j in range(c + 1, matrix.ncols):
                if rows[r][j].is_zero() or v[j].is_zero():
                    continue
                s = s + RationalElement(rows[r][j]) * v[j]
            v[c] = -s / RationalElement(rows[r][c])
        _verify_in_kernel(matrix, v)
        basis.append(v)
    return basis


def _verify_in_kernel(matrix, v):
    zero = RationalElement.zero(matrix.p)
    for row in matrix.rows:
        s = zero
        for e, x in zip(row, v):
            if e.is_zero() or x.is_zero():
                continue
            s = s + e * x
        if not s.is_zero():
            raise AssertionError("kernel vector failed exact re-verification")


def dependence_witness(rows, p=None):
    """A nonzero combination annihilating the given coordinate rows, or None.

    The witness c satisfies sum_i c_i * rows_i = 0 exactly and is re-verified
    before being returned.
    """
    if not rows:
        return None
    if p is None:
        for r in rows:
            for e in r:
                p = e.p
                break
            if p is not None:
                break
    m = FFMatrix(p, rows)
    basis = kernel(m.transpose())
    if not basis:
        return None
    witness = basis[0]
    zero = RationalElement.zero(p)
    for j in range(m.ncols):
        s = zero
        for c, row in zip(witness, rows):
            if c.is_zero() or row[j].is_zero():
                continue
            s = s + c * row[j]
        if not s.is_zero():
            raise AssertionError("dependence witness failed exact re-verification")
    return witness


# -- dense scalar systems mod p ------------------------------------------


def kernel_mod_p(matrix, p):
    """Kernel basis of an integer matrix mod p (rows x cols, numpy or lists).

    Returns a list of length-ncols numpy vectors with entries in [0, p).
    Echelonized the same way as the symbolic kernel: one vector per free
    column, 1 at that column.
    """
    a = np.array(matrix, dtype=np.int64) % p
    if a.ndim != 2:
        raise BadParameterError("matrix must be two-dimensional")
    nrows, ncols = a.shape
    r = 0
    pivot_cols = []
    for c in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivot_cols.append(c)
        r += 1
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        v = np.zeros(ncols, dtype=np.int64)
        v[fc] = 1
        for row_idx, pc in enumerate(pivot_cols):
            v[pc] = (-a[row_idx, fc]) % p
        basis.append(v)
    return basis
