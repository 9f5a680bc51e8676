"""Exact linear algebra over the rationals.

Matrices are lists of rows, entries Fraction (ints accepted and
converted).  Nothing here mutates its arguments.  Sizes stay small
(a few hundred rows at most), so plain Gauss-Jordan over Fraction
is fast enough and keeps everything exact.
"""

from fractions import Fraction


def _copy(mat):
    return [[Fraction(x) for x in row] for row in mat]


def rref(mat):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    rows = _copy(mat)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(mat):
    return len(rref(mat)[1])


def nullspace(mat):
    """Basis of the right kernel as a list of vectors."""
    if not mat:
        return []
    rows, pivots = rref(mat)
    ncols = len(mat[0])
    basis = []
    for fc in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis


def solve(mat, rhs):
    """One solution x of mat @ x = rhs, or None if inconsistent."""
    if not mat:
        return [] if not any(rhs) else None
    ncols = len(mat[0])
    aug = [list(row) + [b] for row, b in zip(mat, rhs)]
    rows, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][-1]
    return x


def mat_vec(mat, v):
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in mat]


class Echelon:
    """Growing echelon basis of sparse vectors {column: Fraction}.

    Stored rows are normalized to pivot 1, where the pivot is the
    smallest column index in the row.  reduce() returns the canonical
    residual supported away from all pivot columns, so a zero residual
    certifies membership in the span.
    """

    def __init__(self):
        self.rows = {}

    def rank(self):
        return len(self.rows)

    def pivots(self):
        return sorted(self.rows)

    def reduce(self, vec):
        vec = {c: Fraction(v) for c, v in vec.items() if v}
        while True:
            piv = None
            for c in vec:
                if c in self.rows and (piv is None or c < piv):
                    piv = c
            if piv is None:
                return vec
            coef = vec.pop(piv)
            for c2, v2 in self.rows[piv].items():
                if c2 == piv:
                    continue
                cur = vec.get(c2, Fraction(0)) - coef * v2
                if cur:
                    vec[c2] = cur
                else:
                    vec.pop(c2, None)

    def add(self, vec):
        """Insert a vector; returns True when it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        self.rows[p] = {c: v * inv for c, v in r.items()}
        return True


def spanning_coefficients(vectors, target):
    """Coefficients c with sum c_i * vectors[i] == target, or None.

    vectors are rows; the solve runs on their transpose.
    """
    if not vectors:
        return [] if not any(target) else None
    cols = [list(c) for c in zip(*vectors)]
    if len(target) != len(cols):
        raise ValueError("length mismatch")
    return solve(cols, list(target))


def in_span(vectors, target):
    return spanning_coefficients(vectors, target) is not None
