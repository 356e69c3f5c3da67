"""Dense exact linear algebra over the rationals.

Everything here works on small matrices (a few hundred rows at most) stored as
lists of lists of ``Fraction``.  It exists so that rank computations, nullspaces
and linear solves used by the solvers are exact; numpy is used elsewhere for the
heavy integer arithmetic, never for decisions that require exactness.

All routines are deterministic: pivots are chosen as the first nonzero entry in
column order, never by magnitude.
"""

from __future__ import annotations

from fractions import Fraction


def frac_matrix(rows):
    """Deep-copy ``rows`` into a list-of-lists of Fractions."""
    return [[Fraction(x) for x in row] for row in rows]


def identity(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def matmul(a, b):
    n, k = len(a), len(b)
    assert all(len(row) == k for row in a), "inner dimensions differ"
    m = len(b[0]) if k else 0
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        arow = a[i]
        orow = out[i]
        for t in range(k):
            c = arow[t]
            if c:
                brow = b[t]
                for j in range(m):
                    if brow[j]:
                        orow[j] += c * brow[j]
    return out


def matvec(a, v):
    assert all(len(row) == len(v) for row in a)
    return [sum((c * x for c, x in zip(row, v) if c and x), Fraction(0)) for row in a]


def rref(mat):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``pivots`` lists the pivot column of each
    nonzero row of ``R`` in order.  The input is not modified.
    """
    r = frac_matrix(mat)
    nrows = len(r)
    ncols = len(r[0]) if nrows else 0
    pivots = []
    prow = 0
    for col in range(ncols):
        sel = None
        for i in range(prow, nrows):
            if r[i][col]:
                sel = i
                break
        if sel is None:
            continue
        r[prow], r[sel] = r[sel], r[prow]
        inv = Fraction(1) / r[prow][col]
        r[prow] = [x * inv for x in r[prow]]
        for i in range(nrows):
            if i != prow and r[i][col]:
                c = r[i][col]
                r[i] = [x - c * y for x, y in zip(r[i], r[prow])]
        pivots.append(col)
        prow += 1
        if prow == nrows:
            break
    return r, pivots


def rank(mat):
    return len(rref(mat)[1])


def inverse(mat):
    """Inverse of a square matrix; raises ValueError when singular."""
    n = len(mat)
    assert all(len(row) == n for row in mat), "matrix must be square"
    aug = [list(map(Fraction, row)) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i, row in enumerate(mat)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def solve(a, b):
    """One solution x of a x = b, or None when the system is inconsistent.

    Free coordinates, if any, are set to zero, so the answer is deterministic.
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    aug = [[Fraction(x) for x in row] + [Fraction(bv)] for row, bv in zip(a, b)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, col in enumerate(piv):
        x[col] = red[i][ncols]
    return x


def nullspace(a):
    """Basis of the right nullspace of a, one vector per free column."""
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    red, piv = rref(a)
    pivset = set(piv)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, col in enumerate(piv):
            v[col] = -red[i][free]
        basis.append(v)
    return basis
