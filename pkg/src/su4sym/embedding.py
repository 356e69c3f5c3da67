"""Conformal embeddings of SU(4) and the exceptional modular invariants.

Each case embeds SU(4) at level 4, 6 or 8 into a level-1 ambient theory
(odd orthogonal, unitary, even orthogonal).  The level is fixed by the
Dynkin index of the embedding, the central charges of the two theories
must agree exactly, and each level-1 ambient character branches into
finitely many SU(4) characters selected by an integer conformal-weight
difference.  The remaining freedom, the branching multiplicities, is
resolved by demanding that the assembled invariant matrix commute with
the modular generators.

The solver works cluster by cluster: ambient irreps whose candidate
lists overlap (or are conjugate) are grouped, the invariant cells of a
cluster satisfy a linear system once earlier clusters are fixed, and
the non-negative integer solutions of that system are kept when they
split into one square per ambient irrep.  Exactness comes from solving
small pivot systems over the rationals and verifying every candidate
against the full integer equation set.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt

import numpy as np

from . import exactla
from .cyclo import CycloNumber
from .fusion import SparseNatMatrix
from .liealg import AffineAlgebraData, Alcove, su4_alcove
from .modular import su4_modular


class NonIntegerIndexError(ValueError):
    """The adjoint branching does not give an integer Dynkin index."""


class NotConformalError(ValueError):
    """The central charges of the two theories differ."""


class NoSolutionError(ValueError):
    """No multiplicity assignment makes the invariant modular."""


def algebra_dim(alg):
    """Dimension of the algebra: rank plus twice the positive roots."""
    return alg.rank + 2 * len(alg.positive_roots)


def adjoint_weight(alg):
    """Highest root written in Dynkin labels."""
    theta = alg.highest_root
    lam = tuple(sum(theta[i] * alg.cartan[i][j] for i in range(alg.rank))
                for j in range(alg.rank))
    assert alg.classical_dim(lam) == algebra_dim(alg)
    return lam


def quadratic_index(alg, lam):
    """Quadratic Dynkin index dim(lam) (lam, lam + 2 rho) / (2 dim g)."""
    shifted = tuple(x + 2 for x in lam)
    value = Fraction(alg.classical_dim(lam)) * alg.pairing(lam, shifted)
    return value / (2 * algebra_dim(alg))


class EmbeddingCase:
    """One conformal embedding of SU(4), before or after resolution.

    The static data is the ambient algebra and the branching of its
    adjoint representation into SU(4) irreps; everything else (level,
    central charge, branching multiplicities, invariant) is derived.
    """

    def __init__(self, name, ambient, adjoint_branching):
        self.name = name
        self.kalgebra = AffineAlgebraData("A", 3)
        self.ambient = ambient
        self.adjoint_branching = tuple(adjoint_branching)
        self.level = None
        self.central_charge = None
        self.branching = None
        self.invariant_matrix = None
        self.is_type_one = None

    def resolved_copy(self, branching, invariant_matrix, is_type_one):
        other = EmbeddingCase(self.name, self.ambient, self.adjoint_branching)
        other.level = self.level
        other.central_charge = self.central_charge
        other.branching = branching
        other.invariant_matrix = invariant_matrix
        other.is_type_one = is_type_one
        return other


_CASE_DATA = {
    "e4": ("B", 7, ((1, 0, 1), (2, 1, 0), (0, 1, 2))),
    "e6": ("A", 9, ((1, 0, 1), (2, 0, 2))),
    "e8": ("D", 10, ((1, 0, 1), (1, 2, 1))),
}


@lru_cache(maxsize=None)
def embedding_case(name):
    series, rank, branching = _CASE_DATA[name]
    ambient = AffineAlgebraData(series, rank)
    case = EmbeddingCase(name, ambient, branching)
    covered = sum(case.kalgebra.classical_dim(nu) for nu in branching)
    assert covered == algebra_dim(ambient), "adjoint branching loses states"
    case.level = dynkin_index(case)
    case.central_charge = conformal_check(case)
    return case


def dynkin_index(case):
    """Level of the embedded SU(4) theory, from the adjoint branching."""
    total = sum(quadratic_index(case.kalgebra, nu) for nu in case.adjoint_branching)
    denom = quadratic_index(case.ambient, adjoint_weight(case.ambient))
    assert denom == case.ambient.dual_coxeter
    k = total / denom
    if k.denominator != 1 or k <= 0:
        raise NonIntegerIndexError(f"index {k} from branching {case.adjoint_branching}")
    return int(k)


def conformal_check(case):
    """Central charge when the embedding is conformal."""
    k = case.level if case.level is not None else dynkin_index(case)
    inner = Fraction(15 * k, k + case.kalgebra.dual_coxeter)
    outer = Fraction(algebra_dim(case.ambient), 1 + case.ambient.dual_coxeter)
    if inner != outer:
        raise NotConformalError(f"central charge {inner} inside vs {outer} outside")
    return inner


def branching_candidates(case):
    """Per ambient level-1 irrep, the SU(4) weights that may branch to it.

    A weight qualifies when its conformal weight differs from the ambient
    one by an integer.  This list still contains entries that the
    modularity constraint will later drop.
    """
    alco = su4_alcove(case.level)
    ambient_alcove = Alcove(case.ambient, 1)
    out = []
    for mu in ambient_alcove.weights:
        h_mu = ambient_alcove.conformal_weight(mu)
        keep = []
        for lam in alco.weights:
            diff = alco.conformal_weight(lam) - h_mu
            if diff.denominator == 1:
                keep.append(lam)
        out.append(keep)
    return out


def _cluster_blocks(cand_idx, conj):
    """Conjugation-closed groups of ambient irreps with entangled candidates."""
    n = len(cand_idx)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for s in range(n):
        union(s, conj[s])
    owners = {}
    for s, block in enumerate(cand_idx):
        for w in block:
            if w in owners:
                union(s, owners[w])
            owners[w] = s
    groups = {}
    for s in range(n):
        groups.setdefault(find(s), []).append(s)
    clusters = []
    for root in sorted(groups):
        blocks = sorted(groups[root])
        weights = sorted({w for s in blocks for w in cand_idx[s]})
        clusters.append({"blocks": blocks, "weights": weights})
    return clusters


def _in_commutant(dense, rep):
    """Exact test that an integer matrix commutes with s and t."""
    assert np.abs(dense).max(initial=0) * np.abs(rep.sint).max() * len(rep) < 2**62
    left = np.tensordot(dense, rep.sint, axes=(1, 0))
    right = np.tensordot(rep.sint, dense, axes=(1, 0)).transpose(0, 2, 1)
    if not np.array_equal(left, right):
        return False
    for i, j in zip(*np.nonzero(dense)):
        if rep.texp[i] != rep.texp[j]:
            return False
    return True


def _cluster_equations(rep, region, future, prior_dense, pin_vacuum):
    """Integer linear system for the symmetric cells of one cluster.

    Rows are the commutator entries that touch the cluster region but no
    later cluster, evaluated on every coefficient slice of the s matrix;
    the right-hand side absorbs the already-fixed clusters.  The vacuum
    cell is pinned to one by an extra row when it lies in this cluster.
    """
    size = len(rep)
    sint = rep.sint
    phi = sint.shape[2]
    regionset = set(region)
    futureset = set(future)
    allowed = [x for x in range(size) if x not in futureset]
    cells = [(m, n) for i, m in enumerate(region) for n in region[i:]]
    cellpos = {c: q for q, c in enumerate(cells)}

    positions = [(i, j) for i in region for j in allowed]
    positions += [(i, j) for i in allowed if i not in regionset for j in region]
    posrow = {pos: r for r, pos in enumerate(positions)}
    npos = len(positions)

    rows_of_j = {}
    for (i, j), r in posrow.items():
        rows_of_j.setdefault(j, ([], []))
        rows_of_j[j][0].append(r)
        rows_of_j[j][1].append(i)
    cols_of_i = {}
    for (i, j), r in posrow.items():
        cols_of_i.setdefault(i, ([], []))
        cols_of_i[i][0].append(r)
        cols_of_i[i][1].append(j)

    eq = np.zeros((phi, npos, len(cells)), dtype=np.int64)
    for q, (m, n) in enumerate(cells):
        rlist, ilist = rows_of_j[n]
        eq[:, rlist, q] += sint[ilist, m, :].T
        if m != n:
            rlist, ilist = rows_of_j[m]
            eq[:, rlist, q] += sint[ilist, n, :].T
        rlist, jlist = cols_of_i[m]
        eq[:, rlist, q] -= sint[n, jlist, :].T
        if m != n:
            rlist, jlist = cols_of_i[n]
            eq[:, rlist, q] -= sint[m, jlist, :].T

    rhs = np.zeros((phi, npos), dtype=np.int64)
    if prior_dense is not None and prior_dense.any():
        rowsel = np.array([p[0] for p in positions])
        colsel = np.array([p[1] for p in positions])
        for c in range(phi):
            comm = sint[:, :, c] @ prior_dense - prior_dense @ sint[:, :, c]
            rhs[c] = -comm[rowsel, colsel]

    eq = eq.reshape(phi * npos, len(cells))
    rhs = rhs.reshape(phi * npos)
    if pin_vacuum:
        pin = np.zeros((1, len(cells)), dtype=np.int64)
        pin[0, cellpos[0, 0]] = 1
        eq = np.vstack([eq, pin])
        rhs = np.concatenate([rhs, [1]])
    return cells, eq, rhs


def _modp_pivot_rows(eq, rhs, p=2147483629):
    """Indices of a row subset carrying the full rank, found modulo p."""
    aug = np.concatenate([eq, rhs[:, None]], axis=1) % p
    ncols = aug.shape[1]
    basis = np.zeros((0, ncols), dtype=np.int64)
    taken = []
    order = np.random.default_rng(1).permutation(aug.shape[0])
    for start in range(0, len(order), 4096):
        chunk = aug[order[start:start + 4096]].copy()
        for brow in basis:
            lead = int(np.argmax(brow != 0))
            factor = chunk[:, lead] % p
            chunk = (chunk - np.outer(factor, brow)) % p
        while True:
            live = np.nonzero(chunk.any(axis=1))[0]
            if live.size == 0:
                break
            r = live[0]
            lead = int(np.argmax(chunk[r] != 0))
            row = chunk[r] * pow(int(chunk[r, lead]), p - 2, p) % p
            basis = np.vstack([basis, row])
            taken.append(int(order[start + r]))
            factor = chunk[:, lead] % p
            chunk = (chunk - np.outer(factor, row)) % p
        if len(taken) == ncols:
            break
    return taken


def _affine_solutions(eq, rhs):
    """Exact particular solution and nullspace of an integer system.

    Pivot rows are selected modulo a prime, solved over the rationals,
    and the result is verified against every row, so the sampling cannot
    produce a wrong answer, only a retry.
    """
    taken = _modp_pivot_rows(eq, rhs)
    sub = [[Fraction(int(v)) for v in eq[r]] for r in taken]
    subrhs = [Fraction(int(rhs[r])) for r in taken]
    part = exactla.solve(sub, subrhs)
    if part is None:
        return None, []
    null = exactla.nullspace(sub)

    def verifies(vec, target_is_rhs):
        scale = 1
        for x in vec:
            scale = scale * x.denominator // np.gcd(scale, x.denominator)
        ints = np.array([int(x * scale) for x in vec], dtype=np.int64)
        assert np.abs(eq).max(initial=0) * max(1, np.abs(ints).max(initial=0)) * eq.shape[1] < 2**62
        got = eq @ ints
        want = rhs * scale if target_is_rhs else np.zeros(len(rhs), dtype=np.int64)
        return np.array_equal(got, want)

    if not verifies(part, True) or not all(verifies(v, False) for v in null):
        raise NoSolutionError("pivot sampling failed to close the system")
    return part, null


def _integer_cell_points(part, null, bound=128):
    """Non-negative integer points of the affine solution space."""
    ncells = len(part)
    if not null:
        if all(x.denominator == 1 and 0 <= x <= bound for x in part):
            return [tuple(int(x) for x in part)]
        return []
    reduced, pivots = exactla.rref([list(v) for v in null])
    dim = len(pivots)
    if dim > 3:
        raise NoSolutionError(f"cluster solution space too wide ({dim})")
    points = set()
    ranges = []
    for i in range(dim):
        base = part[pivots[i]]
        ranges.append([v - base for v in range(0, bound + 1)
                       if (v - base).denominator == 1])
    for ts in product(*ranges):
        vec = list(part)
        for t, row in zip(ts, reduced):
            if t:
                for q in range(ncells):
                    vec[q] += t * row[q]
        if all(x.denominator == 1 and 0 <= x <= bound for x in vec):
            points.add(tuple(int(x) for x in vec))
    return sorted(points)


def _square_splits(value):
    out = []
    for a in range(isqrt(value), -1, -1):
        b2 = value - a * a
        b = isqrt(b2)
        if b * b == b2 and b <= a:
            out.append((a, b))
    return out


def _factor_single(dense, cand, bound=8):
    """Write a symmetric cell matrix as one square supported on cand."""
    live = [m for m in cand if dense[m, m]]
    support = {m for m in cand}
    vec = {}
    for m in np.nonzero(dense.any(axis=1))[0]:
        if int(m) not in support:
            return None
    if not live:
        return [{}] if not dense.any() else None
    a0 = live[0]
    root = isqrt(int(dense[a0, a0]))
    if root * root != dense[a0, a0] or root > bound:
        return None
    for n in cand:
        v, rem = divmod(int(dense[a0, n]), root)
        if rem or v < 0 or v > bound:
            return None
        if v:
            vec[n] = v
    check = np.zeros_like(dense)
    for m, vm in vec.items():
        for n, vn in vec.items():
            check[m, n] = vm * vn
    return [vec] if np.array_equal(check, dense) else None


def _factor_pair(dense, cand_a, cand_b, bound=8):
    """All splittings of a symmetric cell matrix into two squares.

    Supports may coincide (conjugate ambient pairs, spinor pairs), which
    is what makes the splitting ambiguous up to swapping the two blocks;
    results are deduplicated as unordered pairs.
    """
    union = sorted(set(cand_a) | set(cand_b))
    for m in np.nonzero(dense.any(axis=1))[0]:
        if int(m) not in set(union):
            return None
    live = [m for m in union if dense[m, m]]
    if not live:
        return [({}, {})] if not dense.any() else None
    a0 = live[0]
    candidates = []
    for x, y in _square_splits(int(dense[a0, a0])):
        if x > bound:
            continue
        if y == 0:
            va = {}
            for n in union:
                v, rem = divmod(int(dense[a0, n]), x)
                if rem or v > bound:
                    va = None
                    break
                if v:
                    va[n] = v
            if va is None:
                continue
            resid = dense.copy()
            for m, vm in va.items():
                for n, vn in va.items():
                    resid[m, n] -= vm * vn
            if resid.min() < 0:
                continue
            rest = _factor_single(resid, union, bound)
            for vb in rest or []:
                candidates.append((va, vb))
        else:
            stems = [({a0: x}, {a0: y})]
            for n in union:
                if n == a0:
                    continue
                target = int(dense[a0, n])
                grown = []
                for va, vb in stems:
                    for u in range(min(bound, target // x) + 1):
                        w, rem = divmod(target - u * x, y)
                        if rem or w < 0 or w > bound:
                            continue
                        na = dict(va)
                        nb = dict(vb)
                        if u:
                            na[n] = u
                        if w:
                            nb[n] = w
                        grown.append((na, nb))
                stems = grown
                if not stems:
                    break
            candidates.extend(stems)
    found = []
    seen = set()
    for va, vb in candidates:
        check = np.zeros_like(dense)
        for vec in (va, vb):
            for m, vm in vec.items():
                for n, vn in vec.items():
                    check[m, n] += vm * vn
        if not np.array_equal(check, dense):
            continue
        key = frozenset([tuple(sorted(va.items())), tuple(sorted(vb.items()))])
        if key not in seen:
            seen.add(key)
            found.append((va, vb))
    return found or None


def _factor_cluster(cells, point, cluster, cand_idx, size):
    """Split one cluster solution into per-ambient-irrep squares."""
    dense = np.zeros((size, size), dtype=np.int64)
    for (m, n), v in zip(cells, point):
        dense[m, n] = v
        dense[n, m] = v
    blocks = cluster["blocks"]
    if len(blocks) == 1:
        single = _factor_single(dense, cand_idx[blocks[0]])
        return [dict([(blocks[0], v)]) for v in single] if single else []
    if len(blocks) == 2:
        pairs = _factor_pair(dense, cand_idx[blocks[0]], cand_idx[blocks[1]])
        if not pairs:
            return []
        out = []
        for va, vb in pairs:
            options = [(va, vb)] if va == vb else [(va, vb), (vb, va)]
            for left, right in options:
                if set(left) - set(cand_idx[blocks[0]]) or set(right) - set(cand_idx[blocks[1]]):
                    continue
                out.append({blocks[0]: left, blocks[1]: right})
        return out
    raise NoSolutionError(f"no splitting rule for a {len(blocks)}-irrep cluster")


def resolve_multiplicities(case, candidates, rep):
    """All modular-invariant multiplicity assignments over the candidates.

    Clusters are solved in order; each integer solution of a cluster
    system must split into one square per ambient irrep, and complete
    assignments are verified against the full commutant.  Assignments
    related by swapping a conjugate pair of blocks give the same
    invariant; one representative is kept, chosen by the largest
    lexicographic coefficient vector.  When composing a solution with
    the alcove conjugation yields a different matrix, that matrix is
    appended as a further (non sum-of-squares) solution.
    """
    alco = su4_alcove(case.level)
    ambient_alcove = Alcove(case.ambient, 1)
    size = len(alco)
    conj = [ambient_alcove.conjugate_index(s) for s in range(len(ambient_alcove))]
    cand_idx = [[alco.index(w) for w in block] for block in candidates]
    for s, block in enumerate(cand_idx):
        for m in cand_idx[conj[s]]:
            for n in block:
                assert rep.texp[m] == rep.texp[n], "candidates break the t constraint"
    clusters = _cluster_blocks(cand_idx, conj)

    complete = []

    def descend(idx, prior_dense, chosen_blocks):
        if idx == len(clusters):
            complete.append(dict(chosen_blocks))
            return
        cluster = clusters[idx]
        future = [w for later in clusters[idx + 1:] for w in later["weights"]]
        cells, eq, rhs = _cluster_equations(
            rep, cluster["weights"], future, prior_dense,
            pin_vacuum=0 in cluster["weights"])
        part, null = _affine_solutions(eq, rhs)
        if part is None:
            return
        for point in _integer_cell_points(part, null):
            for assignment in _factor_cluster(cells, point, cluster, cand_idx, size):
                dense = prior_dense.copy()
                for (m, n), v in zip(cells, point):
                    dense[m, n] = v
                    dense[n, m] = v
                descend(idx + 1, dense, chosen_blocks + list(assignment.items()))

    descend(0, np.zeros((size, size), dtype=np.int64), [])
    if not complete:
        raise NoSolutionError("no sum of squares matches the modular constraint")

    by_matrix = {}
    for sol in complete:
        gram = np.zeros((size, size), dtype=np.int64)
        for vec in sol.values():
            idxs = sorted(vec)
            for m in idxs:
                for n in idxs:
                    gram[m, n] += vec[m] * vec[n]
        if not _in_commutant(gram, rep):
            continue
        key = tuple(gram[m, n] for m in range(size) for n in range(size) if gram[m, n])
        flat = tuple(tuple(sorted(sol[s].items())) for s in sorted(sol))
        kept = by_matrix.get(tuple(gram.flatten()))
        if kept is None or flat > kept[1]:
            by_matrix[tuple(gram.flatten())] = (gram, flat, sol)

    solutions = []
    for gram, _, sol in by_matrix.values():
        entries = {}
        for m, n in zip(*np.nonzero(gram)):
            entries[int(m), int(n)] = int(gram[m, n])
        matrix = SparseNatMatrix(size, size, entries)
        branching = [{alco.weights[n]: v for n, v in sorted(sol[s].items())}
                     for s in sorted(sol)]
        solutions.append(case.resolved_copy(branching, matrix, True))
        twisted = {}
        for (m, n), v in entries.items():
            twisted[alco.conjugate_index(m), n] = v
        if twisted != entries:
            tmat = SparseNatMatrix(size, size, twisted)
            solutions.append(case.resolved_copy(None, tmat, False))

    def sortkey(sol):
        return sorted(sol.invariant_matrix.entries.items())

    solutions.sort(key=sortkey)
    return solutions


class ModularInvariant:
    """A modular invariant matrix with its block data.

    blocks is one weight->multiplicity dict per ambient level-1 irrep
    when the invariant is a sum of squares, otherwise None.
    """

    def __init__(self, alcove, matrix, blocks):
        assert matrix[0, 0] == 1, "vacuum must couple once"
        self.alcove = alcove
        self.matrix = matrix
        self.blocks = blocks
        self.exponents = sorted({m for (m, n) in matrix.entries if m == n})

    def trace(self):
        return self.matrix.trace()

    def norm(self):
        return sum(v * v for v in self.matrix.entries.values())

    def cell_count(self):
        return len(self.matrix.entries)

    def block_listing(self):
        """Human-readable rendering of the partition function."""
        if self.blocks is None:
            lines = []
            for (m, n), v in sorted(self.matrix.entries.items()):
                mw = "".join(map(str, self.alcove.weights[m]))
                nw = "".join(map(str, self.alcove.weights[n]))
                coeff = f"{v} " if v != 1 else ""
                lines.append(f"{coeff}conj[{mw}] x [{nw}]")
            return "\n".join(lines)
        lines = []
        for block in self.blocks:
            terms = []
            for lam, c in block.items():
                label = "".join(map(str, lam))
                terms.append(label if c == 1 else f"{c} {label}")
            lines.append("|" + " + ".join(terms) + "|^2")
        return "\n".join(lines)


def assemble_invariant(case):
    """Build the ModularInvariant of a resolved sum-of-squares case."""
    assert case.branching is not None, "case must carry resolved multiplicities"
    alco = su4_alcove(case.level)
    size = len(alco)
    gram = np.zeros((size, size), dtype=np.int64)
    for block in case.branching:
        idx = {alco.index(w): c for w, c in block.items()}
        for m, cm in idx.items():
            for n, cn in idx.items():
                gram[m, n] += cm * cn
    entries = {}
    for m, n in zip(*np.nonzero(gram)):
        entries[int(m), int(n)] = int(gram[m, n])
    matrix = SparseNatMatrix(size, size, entries)
    if case.invariant_matrix is not None:
        assert matrix == case.invariant_matrix, "blocks disagree with the solved matrix"
    return ModularInvariant(alco, matrix, case.branching)


def conjugate_invariant(invariant):
    """The invariant composed with conjugation; flags whether it is new."""
    alco = invariant.alcove
    entries = {}
    for (m, n), v in invariant.matrix.entries.items():
        entries[alco.conjugate_index(m), n] = v
    matrix = SparseNatMatrix(len(alco), len(alco), entries)
    out = ModularInvariant(alco, matrix, None)
    out.equals_original = matrix == invariant.matrix
    return out


def block_qdimension(block, alcove):
    """Sum of quantum dimensions (not squared) over a block.

    Each distinct weight counts once: a weight coupled with multiplicity
    two contributes a single copy of its quantum dimension to the block.
    """
    total = CycloNumber.rational(0)
    for lam in block:
        total = total + alcove.quantum_dim(lam)
    return total


@lru_cache(maxsize=None)
def exceptional_invariants(name):
    """Resolve one embedding end to end; returns (case, invariant, all solutions)."""
    case = embedding_case(name)
    rep = su4_modular(case.level)
    candidates = branching_candidates(case)
    solutions = resolve_multiplicities(case, candidates, rep)
    principal = [s for s in solutions if s.is_type_one]
    assert len(principal) == 1, "expected exactly one sum-of-squares invariant"
    return principal[0], assemble_invariant(principal[0]), solutions
