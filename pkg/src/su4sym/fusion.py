"""Fusion matrices of level-k SU(4), a seeded recurrence engine, and
Giambelli determinants.

The fusion ring of SU(4) at level k is generated by the three
fundamental weights.  Multiplication by a fundamental follows from the
Pieri rule on the truncated alcove, and every other fusion matrix is
reached by recursion in the level.  The same recursion, fed with the
adjacency matrices of a candidate graph instead of the fundamental
fusion matrices, produces the annular matrices of that graph; an
invalid seed betrays itself by driving some coefficient negative along
the way, which raises NegativeEntryError instead of returning a wrong
family.
"""

from functools import lru_cache

import numpy as np


class NegativeEntryError(ValueError):
    """A matrix entry that must stay a non-negative integer went negative."""


class SparseNatMatrix:
    """Sparse matrix over the non-negative integers.

    Only nonzero values are stored, in a dict keyed by (row, col).
    Addition and multiplication are closed; subtraction checks the
    result entry by entry and raises NegativeEntryError on a sign flip.
    """

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows, ncols, entries=None):
        assert nrows >= 0 and ncols >= 0
        self.nrows = nrows
        self.ncols = ncols
        self.entries = {}
        for (r, c), v in (entries or {}).items():
            if v == 0:
                continue
            if v < 0:
                raise NegativeEntryError(f"value {v} at ({r}, {c})")
            assert 0 <= r < nrows and 0 <= c < ncols, (r, c)
            self.entries[r, c] = int(v)

    @classmethod
    def _raw(cls, nrows, ncols, entries):
        m = cls.__new__(cls)
        m.nrows = nrows
        m.ncols = ncols
        m.entries = entries
        return m

    @classmethod
    def identity(cls, n):
        return cls._raw(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, rows):
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = {}
        for r, row in enumerate(rows):
            assert len(row) == ncols
            for c, v in enumerate(row):
                if v:
                    entries[r, c] = v
        return cls(nrows, ncols, entries)

    @classmethod
    def from_numpy(cls, arr):
        arr = np.asarray(arr)
        assert arr.ndim == 2
        entries = {}
        for r, c in zip(*np.nonzero(arr)):
            entries[int(r), int(c)] = int(arr[r, c])
        return cls(arr.shape[0], arr.shape[1], entries)

    def to_numpy(self, dtype=np.int64):
        out = np.zeros((self.nrows, self.ncols), dtype=dtype)
        for (r, c), v in self.entries.items():
            out[r, c] = v
        return out

    def to_dense(self):
        return [[self.entries.get((r, c), 0) for c in range(self.ncols)]
                for r in range(self.nrows)]

    def __getitem__(self, rc):
        return self.entries.get(rc, 0)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, SparseNatMatrix):
            return NotImplemented
        return (self.nrows == other.nrows and self.ncols == other.ncols
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.nrows, self.ncols, frozenset(self.entries.items())))

    def __add__(self, other):
        assert self.nrows == other.nrows and self.ncols == other.ncols
        out = dict(self.entries)
        for rc, v in other.entries.items():
            out[rc] = out.get(rc, 0) + v
        return SparseNatMatrix._raw(self.nrows, self.ncols, out)

    def __sub__(self, other):
        assert self.nrows == other.nrows and self.ncols == other.ncols
        out = dict(self.entries)
        for rc, v in other.entries.items():
            w = out.get(rc, 0) - v
            if w < 0:
                raise NegativeEntryError(f"entry {rc} drops to {w}")
            if w:
                out[rc] = w
            else:
                out.pop(rc, None)
        return SparseNatMatrix._raw(self.nrows, self.ncols, out)

    def __matmul__(self, other):
        assert self.ncols == other.nrows
        rows_self = {}
        for (r, c), v in self.entries.items():
            rows_self.setdefault(r, []).append((c, v))
        rows_other = {}
        for (r, c), v in other.entries.items():
            rows_other.setdefault(r, []).append((c, v))
        # accumulate each product row in a dense buffer, then re-sparsify
        out = {}
        buf = [0] * other.ncols
        for r, items in rows_self.items():
            touched = []
            for mid, v in items:
                for c, w in rows_other.get(mid, ()):
                    if buf[c] == 0:
                        touched.append(c)
                    buf[c] += v * w
            for c in touched:
                if buf[c]:
                    out[r, c] = buf[c]
                buf[c] = 0
        return SparseNatMatrix._raw(self.nrows, other.ncols, out)

    def scale(self, factor):
        assert factor >= 0
        if factor == 0:
            return SparseNatMatrix._raw(self.nrows, self.ncols, {})
        return SparseNatMatrix._raw(
            self.nrows, self.ncols,
            {rc: factor * v for rc, v in self.entries.items()})

    def transpose(self):
        return SparseNatMatrix._raw(
            self.ncols, self.nrows,
            {(c, r): v for (r, c), v in self.entries.items()})

    def trace(self):
        assert self.nrows == self.ncols
        return sum(v for (r, c), v in self.entries.items() if r == c)

    def total(self):
        """Sum of all entries."""
        return sum(self.entries.values())

    def is_symmetric(self):
        if self.nrows != self.ncols:
            return False
        return all(self.entries.get((c, r)) == v for (r, c), v in self.entries.items())

    def row_dict(self, r):
        return {c: v for (rr, c), v in self.entries.items() if rr == r}

    def __repr__(self):
        return f"SparseNatMatrix({self.nrows}x{self.ncols}, nnz={len(self.entries)})"

    def serialize(self, name="M"):
        """Text form: version line, `# rows cols name`, sorted `r c v` triplets."""
        assert "\n" not in name
        lines = ["#fkmat v1", f"# {self.nrows} {self.ncols} {name}"]
        for r, c in sorted(self.entries):
            lines.append(f"{r} {c} {self.entries[r, c]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text):
        """Inverse of serialize; returns (matrix, name)."""
        lines = text.splitlines()
        assert lines and lines[0].strip() == "#fkmat v1", "missing fkmat header"
        head = lines[1].lstrip("#").split(None, 2)
        nrows, ncols = int(head[0]), int(head[1])
        name = head[2] if len(head) > 2 else "M"
        entries = {}
        for line in lines[2:]:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            r, c, v = line.split()
            entries[int(r), int(c)] = int(v)
        return cls(nrows, ncols, entries), name


def write_fkmat(path, matrix, name="M"):
    with open(path, "w") as fh:
        fh.write(matrix.serialize(name))


def read_fkmat(path):
    with open(path) as fh:
        return SparseNatMatrix.parse(fh.read())


# Weights of the 4-dimensional and 6-dimensional fundamental
# representations, as shifts on Dynkin labels.
_VECTOR_STEPS = ((1, 0, 0), (-1, 1, 0), (0, -1, 1), (0, 0, -1))
_MIDDLE_STEPS = ((0, 1, 0), (1, -1, 1), (1, 0, -1), (-1, 0, 1), (-1, 1, -1), (0, -1, 0))


def _step_matrix(alcove, steps):
    n = len(alcove)
    entries = {}
    for i, lam in enumerate(alcove.weights):
        for s in steps:
            mu = tuple(x + d for x, d in zip(lam, s))
            if min(mu) < 0 or sum(mu) > alcove.level:
                continue
            entries[i, alcove.index(mu)] = 1
    return SparseNatMatrix(n, n, entries)


def build_fundamental(alcove):
    """Fusion matrices of the three fundamental weights of SU(4).

    The fundamentals are minuscule, so tensoring shifts the highest
    weight by a weight of the fundamental and keeps every dominant
    result; at level k the shifts leaving the alcove simply drop out.
    Returns (N_100, N_010, N_001) with N_001 the transpose of N_100 and
    N_010 symmetric.
    """
    assert alcove.algebra.series == "A" and alcove.algebra.rank == 3
    n100 = _step_matrix(alcove, _VECTOR_STEPS)
    n010 = _step_matrix(alcove, _MIDDLE_STEPS)
    n001 = _step_matrix(alcove, tuple(tuple(-x for x in s) for s in _VECTOR_STEPS))
    assert n001 == n100.transpose()
    assert n010.is_symmetric()
    return n100, n010, n001


def run_recurrence(seed, alcove):
    """Grow a family of matrices over the whole alcove from four seeds.

    seed maps the weights (0,0,0), (1,0,0), (0,1,0), (0,0,1) to square
    matrices of one common size.  Level by level, a weight with a
    nonzero first label comes from multiplying the level below by the
    seed at (1,0,0) and subtracting three earlier terms; a weight
    (0,b,c) with c > 0 is the transpose of the family member at the
    conjugate weight (c,b,0); and (0,l,0) comes from the seed at
    (0,1,0).  Labels that would go negative contribute nothing.

    Any subtraction that would produce a negative entry raises
    NegativeEntryError; with seeds that do not generate a consistent
    family this is the expected failure mode.
    """
    family = {(0, 0, 0): seed[0, 0, 0]}
    if alcove.level == 0:
        return [family[w] for w in alcove.weights]
    for w in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        family[w] = seed[w]
    f100 = seed[1, 0, 0]
    f010 = seed[0, 1, 0]
    for ell in range(2, alcove.level + 1):
        level_weights = [w for w in alcove.weights if sum(w) == ell]
        for a, b, c in level_weights:
            if a >= 1:
                x = f100 @ family[a - 1, b, c]
                for t in ((a - 2, b + 1, c), (a - 1, b - 1, c + 1), (a - 1, b, c - 1)):
                    if min(t) >= 0:
                        x = x - family[t]
                family[a, b, c] = x
        for a, b, c in level_weights:
            if a == 0 and c >= 1:
                family[a, b, c] = family[c, b, 0].transpose()
        x = f010 @ family[0, ell - 1, 0] - family[1, ell - 2, 1] - family[0, ell - 2, 0]
        family[0, ell, 0] = x
    return [family[w] for w in alcove.weights]


class FusionData:
    """Fusion matrices of one alcove, indexed like the alcove."""

    def __init__(self, alcove, matrices):
        assert len(matrices) == len(alcove)
        self.alcove = alcove
        self.matrices = matrices

    def matrix(self, lam):
        return self.matrices[self.alcove.index(lam)]

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)


def fusion_family(alcove):
    """All fusion matrices of the alcove, from the fundamental seeds."""
    n100, n010, n001 = build_fundamental(alcove)
    seed = {
        (0, 0, 0): SparseNatMatrix.identity(len(alcove)),
        (1, 0, 0): n100,
        (0, 1, 0): n010,
        (0, 0, 1): n001,
    }
    return FusionData(alcove, run_recurrence(seed, alcove))


@lru_cache(maxsize=None)
def su4_fusion(level):
    from .liealg import su4_alcove
    return fusion_family(su4_alcove(level))


# Entry codes for the Giambelli band matrix: 0, 1, x1, x2, x3.
_BAND = {-1: 1, 0: 2, 1: 3, 2: 4, 3: 1}


def giambelli(s):
    """Coefficient dict of the s-th Giambelli polynomial in x1, x2, x3.

    The polynomial is the determinant of the s x s band matrix carrying
    1 on the first subdiagonal and x1, x2, x3, 1 along the diagonals
    above it.  Keys are exponent triples (i, j, k) standing for the
    monomial x1^i x2^j x3^k with the x1 powers leftmost; values are the
    integer coefficients.
    """
    assert s >= 1
    rows = tuple(tuple(_BAND.get(j - i, 0) for j in range(s)) for i in range(s))
    return dict(_symbolic_det(rows))


@lru_cache(maxsize=None)
def _symbolic_det(rows):
    if not rows:
        return (((0, 0, 0), 1),)
    total = {}
    for i, row in enumerate(rows):
        code = row[0]
        if code == 0:
            continue
        minor = tuple(r[1:] for j, r in enumerate(rows) if j != i)
        sign = -1 if i % 2 else 1
        for mono, coeff in _symbolic_det(minor):
            if code >= 2:
                mono = tuple(m + (1 if t == code - 2 else 0) for t, m in enumerate(mono))
            total[mono] = total.get(mono, 0) + sign * coeff
    return tuple(sorted((m, c) for m, c in total.items() if c))


def evaluate_giambelli(poly, x1, x2, x3):
    """Evaluate a Giambelli coefficient dict on three square matrices.

    The arguments must commute pairwise (checked), so each monomial can
    be taken with the x1 powers leftmost without ambiguity.  Returns a
    signed integer array; a zero result is the signature of a family
    satisfying the defining relations of the ring.
    """
    mats = []
    for x in (x1, x2, x3):
        a = x.to_numpy() if isinstance(x, SparseNatMatrix) else np.asarray(x)
        mats.append(a.astype(np.int64))
    a1, a2, a3 = mats
    assert a1.shape == a2.shape == a3.shape and a1.shape[0] == a1.shape[1]
    for u, v in ((a1, a2), (a1, a3), (a2, a3)):
        assert np.array_equal(u @ v, v @ u), "arguments must commute"
    n = a1.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    cache = {}

    def mpow(slot, base, e):
        if (slot, e) not in cache:
            cache[slot, e] = np.linalg.matrix_power(base, e)
        return cache[slot, e]

    for (i, j, k), coeff in sorted(poly.items()):
        out += coeff * (mpow(1, a1, i) @ mpow(2, a2, j) @ mpow(3, a3, k))
    return out


def essential_matrices(matrices, a0):
    """Rectangular slice of an annular family at one vertex.

    Row m of the result is row a0 of the m-th matrix, so column b reads
    off how often vertex b appears under the m-th weight acting on a0.
    """
    ncols = matrices[0].ncols
    entries = {}
    for m, f in enumerate(matrices):
        for (a, b), v in f.entries.items():
            if a == a0:
                entries[m, b] = v
    return SparseNatMatrix(len(matrices), ncols, entries)
