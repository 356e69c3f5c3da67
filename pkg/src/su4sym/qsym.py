"""Chiral generators and quantum symmetry graphs of the exceptional cases.

The toric matrices of an exceptional module span its algebra of quantum
symmetries.  Acting with a fundamental fusion matrix on the left or on
the right of a toric matrix and expanding the result over the family
again gives six non-negative integer matrices, the chiral generators of
that algebra.  Entries left undetermined by the expansion are fixed by
requiring the generator family to be normal, mutually commuting, and
annihilated by the three truncation polynomials of the level.  Cutting
the solved generators into connected components yields the exceptional
quantum graph together with its conjugate module when one occurs, and
the derived quantities follow from there: annular matrices, quantum
dimensions, graph algebra structure constants, the distinguished
partition functions, and the two induction morphisms.
"""

import json
import os
from collections import deque
from fractions import Fraction
from itertools import permutations

import numpy as np

from .cyclo import CycloNumber, to_float
from .exactla import frac_matrix, inverse as frac_inverse, matmul as frac_matmul, rank as frac_rank
from .fusion import (
    NegativeEntryError,
    SparseNatMatrix,
    essential_matrices,
    evaluate_giambelli,
    giambelli,
    run_recurrence,
    write_fkmat,
)

_PRIME = 2147483647
_MAX_LIFT_DENOMINATOR = 64
_LIFT_BOUND = 100000
_EXACT_FLOAT_BOUND = 2 ** 53
_SOLUTION_CAP = 512

_FUNDAMENTALS = (("100", (1, 0, 0)), ("010", (0, 1, 0)), ("001", (0, 0, 1)))


class NoNonNegativeSolutionError(ValueError):
    """A required expansion over the toric family does not exist."""

    code = "NO_NONNEGATIVE_SOLUTION"


class OverconstrainedError(ValueError):
    """The generator equations admit no simultaneous solution."""

    code = "OVERCONSTRAINED"


class NoSelfFusionError(ValueError):
    """The graph carries no compatible associative product.

    provable is True when the unique candidate for the structure
    constants exists but violates non-negativity or integrality, and
    False when the annular data does not pin the candidate down.
    """

    code = "NO_SELFFUSION"

    def __init__(self, message, provable):
        super().__init__(message)
        self.provable = provable


def _centered(vec, p=_PRIME):
    vec = vec % p
    return np.where(vec > p // 2, vec - p, vec)


def _lift_small(vec, p=_PRIME):
    """Recover a small-denominator rational vector from its mod-p image."""
    for den in range(1, _MAX_LIFT_DENOMINATOR + 1):
        cand = _centered((den * vec) % p, p)
        if int(np.abs(cand).max(initial=0)) < _LIFT_BOUND:
            return cand.astype(np.int64), den
    raise ArithmeticError("no small-denominator lift found")


class _FamilyBasis:
    """Echelon form of the flattened toric family with row tracking.

    Rows are processed in family order, so pivot rows keep their
    original indices and every dependent member comes with an exact
    integer relation den * W_i = sum(num_j W_j) over earlier pivots.
    """

    def __init__(self, stack):
        self.stack = stack
        d = stack.shape[0]
        echelon, combos, pivcols = [], [], []
        self.pivot_rows, self.free_rows, self.dependencies = [], [], {}
        for i in range(d):
            vec = stack[i] % _PRIME
            coef = np.zeros(d, dtype=np.int64)
            coef[i] = 1
            for j, col in enumerate(pivcols):
                g = int(vec[col])
                if g:
                    vec = (vec - g * echelon[j]) % _PRIME
                    coef = (coef - g * combos[j]) % _PRIME
            nonzero = np.nonzero(vec)[0]
            if nonzero.size:
                col = int(nonzero[0])
                inv = pow(int(vec[col]), _PRIME - 2, _PRIME)
                echelon.append((vec * inv) % _PRIME)
                combos.append((coef * inv) % _PRIME)
                pivcols.append(col)
                self.pivot_rows.append(i)
            else:
                lifted, den = _lift_small(coef)
                assert abs(int(lifted[i])) == den, "dependent row must carry its own index"
                if lifted[i] < 0:
                    lifted = -lifted
                num = -lifted
                num[i] = 0
                assert (den * stack[i] == num @ stack).all(), "dependency fails exactly"
                self.free_rows.append(i)
                self.dependencies[i] = (num, den)
        self._echelon = echelon
        self._combos = combos
        self._pivcols = pivcols

    def express(self, target):
        """Pivot-supported coefficients of a flattened target.

        Returns (num, den) with target = (num / den) @ stack and num
        zero outside the pivot rows.  Raises when the target falls
        outside the span.
        """
        vec = target % _PRIME
        gammas = []
        for j, col in enumerate(self._pivcols):
            g = int(vec[col])
            gammas.append(g)
            if g:
                vec = (vec - g * self._echelon[j]) % _PRIME
        if vec.any():
            raise NoNonNegativeSolutionError("target lies outside the toric span")
        coef = np.zeros(self.stack.shape[0], dtype=np.int64)
        for g, combo in zip(gammas, self._combos):
            if g:
                coef = (coef + g * combo) % _PRIME
        return _lift_small(coef)


class ClassExpansions:
    """Class-level action of the fundamental fusion matrices.

    tmat[(label, side)] is the integer matrix T with, on the left side,
    N_f W_V = sum_U T[V, U] W_U, and with W_V N_f^t on the right side.
    Each expansion is the unique non-negative integer decomposition
    over the family, which stays well defined even when a few members
    are rationally dependent on the rest.
    """

    def __init__(self, family, fusion):
        self.family = family
        self.fusion = fusion
        alcove = fusion.alcove
        mats = [m.to_numpy() for m in family.matrices]
        n = mats[0].shape[0]
        d = len(mats)
        self.nweights = n
        self.stack = np.stack(mats).reshape(d, n * n)
        self.mult = np.array(family.multiplicities, dtype=np.int64)
        basis = _FamilyBasis(self.stack)
        self._basis = basis

        lookup = {self.stack[i].tobytes(): i for i in range(d)}
        conj = np.array([alcove.conjugate_index(i) for i in range(n)])
        self.bar_class = np.empty(d, dtype=np.int64)
        for i, mat in enumerate(mats):
            flipped = mat[np.ix_(conj, conj)]
            self.bar_class[i] = lookup[flipped.reshape(-1).tobytes()]
        self.transpose_class = np.array(
            [family.transpose_partner(i) for i in range(d)], dtype=np.int64
        )

        self.tmat = {}
        self.targets = {}
        for label, weight in _FUNDAMENTALS:
            nf = fusion.matrix(weight).to_numpy()
            for side in "LR":
                prods = np.empty_like(self.stack)
                rows = np.empty((d, d), dtype=np.int64)
                for V in range(d):
                    prod = nf @ mats[V] if side == "L" else mats[V] @ nf.T
                    prods[V] = prod.reshape(-1)
                    rows[V] = self._decompose(prods[V])
                got = rows.astype(np.float64) @ self.stack.astype(np.float64)
                assert np.abs(got).max(initial=0) < _EXACT_FLOAT_BOUND
                assert np.array_equal(got, prods.astype(np.float64)), (
                    "expansion of %s on side %s is inexact" % (label, side)
                )
                self.tmat[label, side] = rows
                self.targets[label, side] = prods
        self._check_identities()

    def _decompose(self, target):
        num, den = self._basis.express(target)
        free = self._basis.free_rows
        if not free:
            if den != 1 or num.min(initial=0) < 0:
                raise NoNonNegativeSolutionError("expansion is not a natural combination")
            return num
        solutions = []
        bounds = []
        mat = target.reshape(self.nweights, self.nweights)
        for r in free:
            wr = self._basis.stack[r].reshape(self.nweights, self.nweights)
            mask = wr > 0
            bounds.append(int((mat[mask] // wr[mask]).min()) if mask.any() else 0)
        grid = [range(b + 1) for b in bounds]
        stackdims = self._basis.stack.shape[0]
        for choice in _cartesian(grid):
            acc = [Fraction(int(x), den) for x in num]
            for r, s in zip(free, choice):
                if s:
                    depnum, depden = self._basis.dependencies[r]
                    for j in np.nonzero(depnum)[0]:
                        acc[j] -= Fraction(s * int(depnum[j]), depden)
            ok = True
            vec = np.zeros(stackdims, dtype=np.int64)
            for r, s in zip(free, choice):
                vec[r] = s
            for j in self._basis.pivot_rows:
                if acc[j].denominator != 1 or acc[j] < 0:
                    ok = False
                    break
                vec[j] = int(acc[j])
            if ok:
                solutions.append(vec)
        if not solutions:
            raise NoNonNegativeSolutionError("expansion is not a natural combination")
        assert len(solutions) == 1, "expansion over the family is not unique"
        return solutions[0]

    def _check_identities(self):
        mult = self.mult
        bar = self.bar_class
        tr = self.transpose_class
        for side in "LR":
            t100 = self.tmat["100", side]
            t010 = self.tmat["010", side]
            t001 = self.tmat["001", side]
            assert np.array_equal(mult[:, None] * t001, mult[None, :] * t100.T)
            assert np.array_equal(mult[:, None] * t010, mult[None, :] * t010.T)
            assert np.array_equal(t001, t100[np.ix_(bar, bar)])
            assert np.array_equal(t010, t010[np.ix_(bar, bar)])
        for label in ("100", "010", "001"):
            left = self.tmat[label, "L"]
            right = self.tmat[label, "R"]
            assert np.array_equal(right, left[np.ix_(tr, tr)])


def _cartesian(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for tail in _cartesian(ranges[1:]):
            yield (head,) + tail


class SlotSystem:
    """Vertices of the symmetry algebra, grouped by shared toric matrix."""

    def __init__(self, family):
        mult = list(family.multiplicities)
        self.offset = np.concatenate(([0], np.cumsum(mult))).astype(np.int64)
        self.nslots = int(self.offset[-1])
        self.slot_class = np.repeat(np.arange(len(mult)), mult).astype(np.int64)
        self.vacuum_class = family.index_of_vacuum
        assert mult[self.vacuum_class] == 1, "the vacuum matrix must be simple"
        self.origin = int(self.offset[self.vacuum_class])

    def slots(self, cls):
        return list(range(int(self.offset[cls]), int(self.offset[cls + 1])))


class _DisjointSets:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


class _Block:
    """One undetermined block of a generator matrix."""

    def __init__(self, mat, V, U, rows, cols, t, colsum):
        self.mat = mat
        self.V = V
        self.U = U
        self.rows = rows
        self.cols = cols
        self.t = t
        self.colsum = colsum
        self.todo = 0
        self.restricted = False
        self.rep_atom = None
        self.rowsorted = False


class _GeneratorSolver:
    """Depth-first completion of the two independent chiral generators.

    The first matrix expands the action of the first fundamental weight
    and the second, kept symmetric, the middle one.  Cells forced by
    the class-level expansion are filled outright.  The rest are
    searched with row and column sum propagation, interval bounds on
    every commutator the pair must satisfy, and a spanning-forest
    restriction that quotients out slot relabelings inside classes
    sharing one toric matrix.  Solutions violating the truncation
    polynomials are discarded as they appear.
    """

    def __init__(self, slots, mult, tA, tS, gpolys, fixed=None, break_gauge=True):
        n = slots.nslots
        d = len(mult)
        self.slots = slots
        self.mult = mult
        self.n = n
        self.gpolys = gpolys
        self.fixed = fixed

        self.Alo = np.zeros((n, n), dtype=np.int64)
        self.Ahi = np.zeros((n, n), dtype=np.int64)
        self.Slo = np.zeros((n, n), dtype=np.int64)
        self.Shi = np.zeros((n, n), dtype=np.int64)
        self._mats = ((self.Alo, self.Ahi), (self.Slo, self.Shi))

        depth = self._class_depths(tA, tS, d, slots.vacuum_class)
        blockspecs = []
        for mat, T in ((0, tA), (1, tS)):
            for V in range(d):
                for U in range(d):
                    if mat == 1 and U < V:
                        continue
                    t = int(T[V, U])
                    if t:
                        blockspecs.append((depth[V] + depth[U], mat, V, U, t))
        blockspecs.sort()

        self.atom_cells = []
        self.atom_segs = []
        self.atom_block = []
        self.aval = []
        self.blocks = []
        self.seg_rem = []
        self.seg_todo = []
        self.seg_atoms = []
        forest = _DisjointSets(d)
        sorted_rows = set()

        for _, mat, V, U, t in blockspecs:
            rows = slots.slots(V)
            cols = slots.slots(U)
            muV, muU = mult[V], mult[U]
            if (muV * t) % muU:
                raise NoNonNegativeSolutionError("block column sums are not integral")
            colsum = muV * t // muU
            if muV == 1 or muU == 1:
                if t % muU:
                    raise NoNonNegativeSolutionError("block entries are not integral")
                value = t // muU if muV == 1 else t
                for x in rows:
                    for y in cols:
                        self._preset(mat, x, y, value)
                        if mat == 1 and V != U:
                            self._preset(mat, y, x, value)
                continue
            block = _Block(mat, V, U, rows, cols, t, colsum)
            bi = len(self.blocks)
            self.blocks.append(block)
            ub = min(t, colsum)
            atoms_here = {}
            if mat == 0:
                for x in rows:
                    for y in cols:
                        atoms_here[x, y] = self._new_atom(bi, [(0, x, y)], ub)
            elif V != U:
                for x in rows:
                    for y in cols:
                        atoms_here[x, y] = self._new_atom(bi, [(1, x, y), (1, y, x)], ub)
            else:
                for i, x in enumerate(rows):
                    for y in rows[i:]:
                        cells = [(1, x, y)] if x == y else [(1, x, y), (1, y, x)]
                        atoms_here[x, y] = self._new_atom(bi, cells, ub)
            block.todo = len(atoms_here)
            block.rep_atom = atoms_here[rows[0], cols[0]]

            def lookup(x, y):
                return atoms_here[(x, y)] if (x, y) in atoms_here else atoms_here[(y, x)]

            for x in rows:
                self._new_segment(t, [lookup(x, y) for y in cols])
            if not (mat == 1 and V == U):
                for y in cols:
                    self._new_segment(colsum, [lookup(x, y) for x in rows])

            if break_gauge and muV == 2 and muU == 2 and V != U and forest.union(V, U):
                block.restricted = True
            if break_gauge and muV > 2 and V not in sorted_rows:
                block.rowsorted = True
                sorted_rows.add(V)

        self.natoms = len(self.atom_cells)
        self.aval = [-1] * self.natoms

        specs = {
            "AAt_lo": (("A", "lo", 0), ("A", "lo", 1)),
            "AAt_hi": (("A", "hi", 0), ("A", "hi", 1)),
            "AtA_lo": (("A", "lo", 1), ("A", "lo", 0)),
            "AtA_hi": (("A", "hi", 1), ("A", "hi", 0)),
            "AS_lo": (("A", "lo", 0), ("S", "lo", 0)),
            "AS_hi": (("A", "hi", 0), ("S", "hi", 0)),
            "SA_lo": (("S", "lo", 0), ("A", "lo", 0)),
            "SA_hi": (("S", "hi", 0), ("A", "hi", 0)),
        }
        conds = [
            ("AAt_lo", "AtA_hi", "AAt_hi", "AtA_lo"),
            ("AS_lo", "SA_hi", "AS_hi", "SA_lo"),
        ]
        if fixed is not None:
            for gen, other in (("A", "K"), ("A", "T"), ("S", "K"), ("S", "T")):
                for bound in ("lo", "hi"):
                    specs[gen + other + "_" + bound] = ((gen, bound, 0), (other, None, 0))
                    specs[other + gen + "_" + bound] = ((other, None, 0), (gen, bound, 0))
                conds.append((
                    gen + other + "_lo", other + gen + "_hi",
                    gen + other + "_hi", other + gen + "_lo",
                ))
        self._prodspec = specs
        self._conds = conds
        self._prods = {
            key: self._matrix(lref) @ self._matrix(rref)
            for key, (lref, rref) in specs.items()
        }
        self.journal = []
        self.solutions = []
        self.nodes = 0
        self.max_solutions = _SOLUTION_CAP

    @staticmethod
    def _class_depths(tA, tS, d, start):
        adjacent = ((tA + tA.T + tS + tS.T) > 0)
        depth = [d + 1] * d
        depth[start] = 0
        todo = deque([start])
        while todo:
            v = todo.popleft()
            for u in np.nonzero(adjacent[v])[0]:
                if depth[u] > depth[v] + 1:
                    depth[u] = depth[v] + 1
                    todo.append(int(u))
        return depth

    def _preset(self, mat, x, y, value):
        lo, hi = self._mats[mat]
        lo[x, y] = value
        hi[x, y] = value

    def _new_atom(self, block_index, cells, ub):
        a = len(self.atom_cells)
        self.atom_cells.append(cells)
        self.atom_segs.append([])
        self.atom_block.append(block_index)
        lo, hi = self._mats[cells[0][0]]
        for _, x, y in cells:
            hi[x, y] = ub
        return a

    def _new_segment(self, target, atoms):
        s = len(self.seg_rem)
        self.seg_rem.append(target)
        self.seg_todo.append(len(atoms))
        self.seg_atoms.append(atoms)
        for a in atoms:
            self.atom_segs[a].append(s)

    def _matrix(self, ref):
        name, bound, trans = ref
        if name == "A":
            base = self.Alo if bound == "lo" else self.Ahi
        elif name == "S":
            base = self.Slo if bound == "lo" else self.Shi
        elif name == "K":
            base = self.fixed[0]
        else:
            base = self.fixed[1]
        return base.T if trans else base

    def _sync(self, mat, x, y):
        token = "AS"[mat]
        for key, (lref, rref) in self._prodspec.items():
            if lref[0] == token:
                arr = self._prods[key]
                i = y if lref[2] else x
                self.journal.append(("pr", key, i, arr[i, :].copy()))
                arr[i, :] = self._matrix(lref)[i] @ self._matrix(rref)
            if rref[0] == token:
                arr = self._prods[key]
                j = x if rref[2] else y
                self.journal.append(("pc", key, j, arr[:, j].copy()))
                arr[:, j] = self._matrix(lref) @ self._matrix(rref)[:, j]

    def _cell_set(self, mat, x, y, v):
        lo, hi = self._mats[mat]
        oldlo = int(lo[x, y])
        oldhi = int(hi[x, y])
        if v < oldlo or v > oldhi:
            return False
        if oldlo == v and oldhi == v:
            return True
        self.journal.append(("cell", mat, x, y, oldlo, oldhi))
        lo[x, y] = v
        hi[x, y] = v
        self._sync(mat, x, y)
        return True

    def _rows_sorted(self, block):
        lo = self._mats[block.mat][0]
        sub = lo[np.ix_(block.rows, block.cols)]
        rows = [tuple(r) for r in sub]
        return all(rows[i] <= rows[i + 1] for i in range(len(rows) - 1))

    def _set_atom(self, a, v, queue):
        cur = self.aval[a]
        if cur >= 0:
            return cur == v
        if v < 0:
            return False
        self.journal.append(("av", a))
        self.aval[a] = v
        for mat, x, y in self.atom_cells[a]:
            if not self._cell_set(mat, x, y, v):
                return False
        for s in self.atom_segs[a]:
            self.journal.append(("seg", s, self.seg_rem[s], self.seg_todo[s]))
            self.seg_rem[s] -= v
            self.seg_todo[s] -= 1
            if self.seg_rem[s] < 0:
                return False
            if self.seg_todo[s] == 0:
                if self.seg_rem[s] != 0:
                    return False
            elif self.seg_todo[s] == 1:
                for b in self.seg_atoms[s]:
                    if self.aval[b] < 0:
                        queue.append((b, self.seg_rem[s]))
                        break
        bi = self.atom_block[a]
        block = self.blocks[bi]
        self.journal.append(("blk", bi, block.todo))
        block.todo -= 1
        if block.todo == 0 and block.rowsorted and not self._rows_sorted(block):
            return False
        return True

    def _assign(self, a, v):
        queue = deque([(a, v)])
        while queue:
            b, w = queue.popleft()
            if not self._set_atom(b, w, queue):
                return False
        return True

    def _feasible(self):
        prods = self._prods
        for low, high, high2, low2 in self._conds:
            if not (prods[low] <= prods[high]).all():
                return False
            if not (prods[high2] >= prods[low2]).all():
                return False
        return True

    def _undo(self, mark):
        while len(self.journal) > mark:
            entry = self.journal.pop()
            tag = entry[0]
            if tag == "pr":
                self._prods[entry[1]][entry[2], :] = entry[3]
            elif tag == "pc":
                self._prods[entry[1]][:, entry[2]] = entry[3]
            elif tag == "cell":
                _, mat, x, y, oldlo, oldhi = entry
                lo, hi = self._mats[mat]
                lo[x, y] = oldlo
                hi[x, y] = oldhi
            elif tag == "seg":
                self.seg_rem[entry[1]] = entry[2]
                self.seg_todo[entry[1]] = entry[3]
            elif tag == "av":
                self.aval[entry[1]] = -1
            else:
                self.blocks[entry[1]].todo = entry[2]

    def _branch_values(self, a):
        hi = min(int(self._mats[mat][1][x, y]) for mat, x, y in self.atom_cells[a])
        rem = min(self.seg_rem[s] for s in self.atom_segs[a])
        vmax = min(hi, rem)
        block = self.blocks[self.atom_block[a]]
        if block.restricted and a == block.rep_atom:
            return [v for v in range(vmax + 1) if 2 * v <= block.t]
        return list(range(vmax + 1))

    def _sweep(self):
        changed = True
        while changed:
            changed = False
            for a in range(self.natoms):
                if self.aval[a] >= 0:
                    continue
                keep = []
                for v in self._branch_values(a):
                    mark = len(self.journal)
                    ok = self._assign(a, v) and self._feasible()
                    self._undo(mark)
                    if ok:
                        keep.append(v)
                        if len(keep) > 1:
                            break
                if not keep:
                    return False
                if len(keep) == 1:
                    if not (self._assign(a, keep[0]) and self._feasible()):
                        return False
                    changed = True
        return True

    def _record(self):
        assert np.array_equal(self.Alo, self.Ahi)
        assert np.array_equal(self.Slo, self.Shi)
        assert np.array_equal(self._prods["AAt_lo"], self._prods["AtA_lo"])
        assert np.array_equal(self._prods["AS_lo"], self._prods["SA_lo"])
        if self.fixed is not None:
            for one, two in (("AK", "KA"), ("AT", "TA"), ("SK", "KS"), ("ST", "TS")):
                assert np.array_equal(self._prods[one + "_lo"], self._prods[two + "_lo"])
        A = self.Alo.copy()
        S = self.Slo.copy()
        for poly in self.gpolys:
            if evaluate_giambelli(poly, A, S, A.T).any():
                return
        self.solutions.append((A, S))
        if len(self.solutions) > self.max_solutions:
            raise RuntimeError("generator solution count exceeds the cap")

    def _dfs(self, start):
        a = start
        while a < self.natoms and self.aval[a] >= 0:
            a += 1
        if a == self.natoms:
            self._record()
            return
        self.nodes += 1
        for v in self._branch_values(a):
            mark = len(self.journal)
            if self._assign(a, v) and self._feasible() and self._sweep():
                self._dfs(a + 1)
            self._undo(mark)

    def search(self, max_solutions=_SOLUTION_CAP):
        self.max_solutions = max_solutions
        self.solutions = []
        mark = len(self.journal)
        ok = self._initial_propagate() and self._feasible() and self._sweep()
        if ok:
            self._dfs(0)
        self._undo(mark)
        return self.solutions

    def _initial_propagate(self):
        for s in range(len(self.seg_rem)):
            if self.seg_todo[s] == 0:
                if self.seg_rem[s] != 0:
                    return False
            elif self.seg_todo[s] == 1:
                for b in self.seg_atoms[s]:
                    if self.aval[b] < 0:
                        if not self._assign(b, self.seg_rem[s]):
                            return False
                        break
        return True
