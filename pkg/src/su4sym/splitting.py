"""Modular splitting for the exceptional SU(4) invariants.

Given the fusion matrices N_m of one alcove and a modular invariant M,
the tensor K[m, n] = N_m M N_n^t expands over the toric matrices W_x
with non-negative integer coefficients, and the coefficient carried by
W_x inside K[m, n] is the entry of W_x at the conjugated cell
(conj m, conj n).  Reading the equations from small norms upward
therefore recovers the whole toric family: the norm of a cell,
K[m, n][conj m, conj n], equals the sum of the squared coefficients,
so a cell of norm 1 hands over a new toric matrix directly, while
larger residual norms leave a finite list of (multiplicity, cell)
factorizations to branch over.

Residual norms of 2 need one more idea.  Such a residual is a sum of
two unit-coefficient matrices, an edge between two unresolved members,
and distinct edges meet in at most one member, so the edges form a
graph whose vertices can be walked off a spanning tree: around an odd
cycle the alternating sum determines the base vertex outright, while
bipartite components keep a single matrix parameter.  That parameter
is pinned by linear algebra: every toric matrix lies in the row span
of the K matrices, and the cells forced by non-negativity and by the
known 0/1 values at the edge cells overdetermine its coordinates in
that span, so solving the fixed cells modulo two large primes and
lifting recovers the last vertices exactly.
"""

import json
import os
from collections import Counter
from math import isqrt

import numpy as np

from .embedding import exceptional_invariants
from .fusion import SparseNatMatrix, su4_fusion, write_fkmat

_EXACT_BOUND = 2 ** 53
_RANK_PRIMES = (2147483647, 2147483629)


class IncompleteFamilyError(ValueError):
    """No toric family of the required total size explains the tensor."""

    code = "INCOMPLETE_FAMILY"


class AmbiguousDecompositionError(ValueError):
    """Several inequivalent toric families satisfy every constraint."""

    code = "AMBIGUOUS_DECOMPOSITION"

    def __init__(self, message, branches):
        super().__init__(message)
        self.branches = branches


class KTensorView:
    """Lazy view of the tensor K[m, n] = N_m M N_n^t for one case.

    The full tensor is far too large to keep, but it repeats itself
    heavily: only the distinct matrices are stored, together with the
    map from cells (m, n) to them.  Everything is computed in float64
    matrix products, which are exact here because all factors are
    non-negative integers and every partial sum stays below 2**53.
    """

    def __init__(self, name, cache_dir=None):
        case, invariant, _ = exceptional_invariants(name)
        self.name = name
        self.case = case
        self.invariant = invariant
        self.alcove = invariant.alcove
        self.size = len(self.alcove)
        self.conj = np.array(
            [self.alcove.conjugate_index(i) for i in range(self.size)], dtype=np.int64
        )
        self.matrix = invariant.matrix.to_numpy()
        self.cache_dir = cache_dir
        self._stack = None
        self._pair_id = None
        self._norm_of = None
        self._first = None
        self._span = {}

    # -- construction ------------------------------------------------

    def _cache_path(self):
        if self.cache_dir is None:
            return None
        return os.path.join(self.cache_dir, "ktensor_%s.npz" % self.name)

    def _try_load(self):
        path = self._cache_path()
        if path is None or not os.path.exists(path):
            return False
        data = np.load(path)
        if not np.array_equal(data["invariant"], self.matrix):
            return False
        if not np.array_equal(data["conj"], self.conj):
            return False
        self._stack = data["stack"]
        self._pair_id = data["pair_id"]
        self._norm_of = data["norm_of"]
        self._first = data["first"]
        return True

    def _save(self):
        path = self._cache_path()
        if path is None:
            return
        os.makedirs(self.cache_dir, exist_ok=True)
        np.savez_compressed(
            path,
            stack=self._stack,
            pair_id=self._pair_id,
            norm_of=self._norm_of,
            first=self._first,
            invariant=self.matrix,
            conj=self.conj,
        )

    def _ensure(self):
        if self._stack is not None:
            return
        if self._try_load():
            return
        r = self.size
        fus = su4_fusion(self.case.level)
        n_stack = np.stack([mat.to_numpy() for mat in fus.matrices]).astype(np.float64)
        t_stack = n_stack @ self.matrix.astype(np.float64)
        # b[k, n*r + j] = N[n, j, k], so T[m] @ b lists K[m, n] row blocks.
        b_flat = n_stack.transpose(2, 0, 1).reshape(r, r * r)
        key_to_id = {}
        distinct = []
        first = []
        pair_id = np.empty((r, r), dtype=np.int32)
        pair_norm = np.empty((r, r), dtype=np.int64)
        for m in range(r):
            block = t_stack[m] @ b_flat
            assert block.min() >= 0.0 and block.max() < _EXACT_BOUND
            km = np.rint(block).astype(np.int64)
            assert np.array_equal(km.astype(np.float64), block)
            km = km.reshape(r, r, r).transpose(1, 0, 2)
            assert km.max() < 2 ** 31
            cm = self.conj[m]
            pair_norm[m] = km[np.arange(r), cm, self.conj]
            for n in range(r):
                key = km[n].astype(np.int32).tobytes()
                ident = key_to_id.get(key)
                if ident is None:
                    ident = len(distinct)
                    key_to_id[key] = ident
                    distinct.append(km[n].astype(np.int32))
                    first.append((m, n))
                pair_id[m, n] = ident
        del t_stack, b_flat, n_stack
        norm_of = np.full(len(distinct), -1, dtype=np.int64)
        for m in range(r):
            for n in range(r):
                ident = pair_id[m, n]
                if norm_of[ident] < 0:
                    norm_of[ident] = pair_norm[m, n]
                else:
                    assert norm_of[ident] == pair_norm[m, n], (
                        "norm must be a function of the matrix alone"
                    )
        self._stack = np.stack(distinct)
        self._pair_id = pair_id
        self._norm_of = norm_of
        self._first = np.array(first, dtype=np.int32)
        assert self._pair_id[0, 0] == 0
        assert np.array_equal(self._stack[0].astype(np.int64), self.matrix)
        assert self._norm_of[0] == 1
        self._save()

    # -- accessors ---------------------------------------------------

    @property
    def distinct_count(self):
        self._ensure()
        return len(self._stack)

    def distinct_matrix(self, ident):
        self._ensure()
        return self._stack[ident].astype(np.int64)

    def pair_class(self, m, n):
        self._ensure()
        return int(self._pair_id[m, n])

    def first_pair(self, ident):
        self._ensure()
        return tuple(int(v) for v in self._first[ident])

    def pair(self, m, n):
        """The matrix K[m, n] as a SparseNatMatrix."""
        self._ensure()
        return SparseNatMatrix.from_numpy(self._stack[self._pair_id[m, n]])

    def norm(self, m, n):
        """The cell norm K[m, n][conj m, conj n]."""
        self._ensure()
        return int(self._norm_of[self._pair_id[m, n]])

    def census(self):
        """How many distinct matrices occur at each norm."""
        self._ensure()
        return dict(sorted(Counter(int(u) for u in self._norm_of).items()))

    def nonzero_count(self):
        """Total number of non-zero entries over all cells of the tensor."""
        self._ensure()
        per_distinct = (self._stack != 0).sum(axis=(1, 2)).astype(np.int64)
        usage = np.bincount(self._pair_id.ravel(), minlength=len(self._stack))
        return int((per_distinct * usage).sum())

    def span_rows(self, prime):
        """Row-echelon basis, modulo a prime, of the span of the tensor.

        The rows are scanned in a deterministic shuffled order and the
        scan stops early once a long run of rows brings nothing new;
        any member the basis happens to miss only makes the downstream
        solver bail out, never accept a wrong matrix.
        """
        self._ensure()
        basis = self._span.get(prime)
        if basis is not None:
            return basis
        order = np.random.default_rng(20).permutation(len(self._stack))
        rows = []
        cols = []
        stale = 0
        for ident in order:
            vec = self._stack[ident].astype(np.int64).ravel() % prime
            for col, row in zip(cols, rows):
                coef = int(vec[col])
                if coef:
                    vec = (vec - coef * row) % prime
            support = np.nonzero(vec)[0]
            if support.size == 0:
                stale += 1
                if stale >= 300:
                    break
                continue
            stale = 0
            col = int(support[0])
            inv = pow(int(vec[col]), prime - 2, prime)
            rows.append((vec * inv) % prime)
            cols.append(col)
        basis = np.stack(rows)
        self._span[prime] = basis
        return basis


def knorm_census(view):
    """Map each occurring norm to its count of distinct matrices."""
    return view.census()


class ToricFamily:
    """The toric matrices of one case: distinct members with multiplicities."""

    def __init__(self, matrices, multiplicities, index_of_vacuum, rank):
        assert len(matrices) == len(multiplicities)
        self.matrices = list(matrices)
        self.multiplicities = list(multiplicities)
        self.total = sum(multiplicities)
        self.rank = rank
        self.index_of_vacuum = index_of_vacuum
        self._keys = {
            mat.to_numpy().astype(np.int32).tobytes(): i
            for i, mat in enumerate(self.matrices)
        }

    def __len__(self):
        return len(self.matrices)

    def index_of(self, matrix):
        key = matrix.to_numpy().astype(np.int32).tobytes()
        return self._keys.get(key)

    def transpose_partner(self, i):
        j = self.index_of(self.matrices[i].transpose())
        assert j is not None, "family must be closed under transposition"
        return j

    def is_symmetric(self, i):
        return self.matrices[i].is_symmetric()

    def multiplicity_histogram(self):
        return dict(sorted(Counter(self.multiplicities).items()))

    def dump(self, directory):
        """Write one fkmat file per member plus an index.json."""
        os.makedirs(directory, exist_ok=True)
        members = []
        for i, (mat, mult) in enumerate(zip(self.matrices, self.multiplicities)):
            fname = "w%03d.fkmat" % i
            write_fkmat(os.path.join(directory, fname), mat, name="W%d" % i)
            members.append(
                {
                    "position": i,
                    "file": fname,
                    "multiplicity": mult,
                    "transpose_partner": self.transpose_partner(i),
                    "is_symmetric": self.is_symmetric(i),
                }
            )
        index = {
            "total": self.total,
            "rank": self.rank,
            "index_of_vacuum": self.index_of_vacuum,
            "members": members,
        }
        with open(os.path.join(directory, "index.json"), "w") as handle:
            json.dump(index, handle, indent=1)
        return index


# -- extraction engine ----------------------------------------------


class _Equations:
    """All r*r cell equations of one view, in resolution order.

    Every cell (m, n) yields one equation: the matrix K[m, n] equals
    the family combination with coefficients read at (conj m, conj n).
    Equations are sorted by the norm of their matrix, then by the
    matrix itself, then by scan position, so the small norms resolve
    first and every cell of one matrix is consulted.
    """

    def __init__(self, view):
        view._ensure()
        r = view.size
        grid = np.indices((r, r)).reshape(2, -1)
        ids = view._pair_id[grid[0], grid[1]].astype(np.int64)
        order = np.lexsort((grid[1], grid[0], ids, view._norm_of[ids]))
        self.view = view
        self.ids = ids[order]
        self.norm = view._norm_of[self.ids]
        self.mb = view.conj[grid[0][order]]
        self.nb = view.conj[grid[1][order]]
        self.count = r * r

    def matrix(self, e):
        return self.view._stack[self.ids[e]].astype(np.int64)

    def residual(self, e, state):
        resid = self.matrix(e)
        fam = state.family_stack()
        if fam is not None:
            stack, mults = fam
            coef = mults * stack[:, self.mb[e], self.nb[e]]
            live = np.nonzero(coef)[0]
            if live.size:
                resid -= np.tensordot(coef[live], stack[live], axes=1)
        return resid


class _State:
    __slots__ = ("members", "mults", "keys", "explained", "total", "_fam")

    def __init__(self, count):
        self.members = []
        self.mults = []
        self.keys = {}
        self.explained = np.zeros(count, dtype=bool)
        self.total = 0
        self._fam = None

    def clone(self):
        other = _State.__new__(_State)
        other.members = list(self.members)
        other.mults = list(self.mults)
        other.keys = dict(self.keys)
        other.explained = self.explained.copy()
        other.total = self.total
        other._fam = None
        return other

    def family_stack(self):
        if self._fam is None and self.members:
            self._fam = (
                np.stack(self.members),
                np.array(self.mults, dtype=np.int64),
            )
        return self._fam

    def absorb(self, matrix, mult):
        """Add a new member, or raise the multiplicity of a known one."""
        key = matrix.astype(np.int32).tobytes()
        index = self.keys.get(key)
        if index is None:
            self.keys[key] = len(self.members)
            self.members.append(matrix)
            self.mults.append(mult)
        else:
            self.mults[index] += mult
        self.total += mult
        self._fam = None

    def signature(self):
        return frozenset(zip(self.keys, self.mults))


def _run_sweeps(eqs, state, budget):
    """Apply the forced rules until nothing moves.  False on contradiction.

    Each sweep recomputes the open equations' residual norms in one
    vector pass; a norm of zero closes its equation, a norm of one
    forces the residual into the family, either as a new member or as
    one more copy of a known one.
    """
    while True:
        open_idx = np.nonzero(~state.explained)[0]
        if open_idx.size == 0:
            return True
        fam = state.family_stack()
        if fam is None:
            uleft = eqs.norm[open_idx].copy()
        else:
            stack, mults = fam
            cells = stack[:, eqs.mb[open_idx], eqs.nb[open_idx]]
            uleft = eqs.norm[open_idx] - (mults[:, None] * cells * cells).sum(axis=0)
        if (uleft < 0).any():
            return False
        state.explained[open_idx[uleft == 0]] = True
        ones = open_idx[uleft == 1]
        if ones.size == 0:
            return True
        e = int(ones[0])
        resid = eqs.residual(e, state)
        if resid.min() < 0 or state.total + 1 > budget:
            return False
        state.absorb(resid, 1)
        state.explained[e] = True


def _stall_candidates(eqs, state, budget, e):
    """Single-matrix factorizations of one stalled equation's residual.

    A residual of norm u can be mu copies of one matrix whose cell at
    (mb, nb) is c, provided mu * c**2 == u and the residual divides
    evenly by mu * c.  Candidates come ordered by growing multiplicity,
    which keeps the family total small first.
    """
    resid = eqs.residual(e, state)
    if resid.min() < 0:
        return None, []
    left = int(resid[eqs.mb[e], eqs.nb[e]])
    found = []
    for cell in range(isqrt(left), 0, -1):
        if left % (cell * cell):
            continue
        mult = left // (cell * cell)
        if state.total + mult > budget:
            continue
        quot, rem = np.divmod(resid, mult * cell)
        if rem.any():
            continue
        found.append((quot, mult))
    return resid, found


def _solve_span_member(basis, prime, fixed, values):
    """The unique span member agreeing with the fixed cells, or None.

    The basis is re-echelonized so that every pivot lands on a fixed
    cell; the member's coordinates then read off the fixed values by
    forward substitution.  None signals that the fixed cells leave the
    member underdetermined.  The reconstruction accumulates one row
    product at a time, keeping every intermediate below 2**63.
    """
    work = basis.copy()
    pivots = []
    for i in range(len(work)):
        vec = work[i]
        for j, col in enumerate(pivots):
            coef = int(vec[col])
            if coef:
                vec = (vec - coef * work[j]) % prime
        support = np.nonzero((vec != 0) & fixed)[0]
        if support.size == 0:
            return None
        col = int(support[0])
        inv = pow(int(vec[col]), prime - 2, prime)
        work[i] = (vec * inv) % prime
        pivots.append(col)
    pending = {col: int(values[col]) % prime for col in pivots}
    coords = []
    for i, col in enumerate(pivots):
        ci = pending[col]
        coords.append(ci)
        if ci:
            for later in pivots[i + 1:]:
                pending[later] = (pending[later] - ci * int(work[i, later])) % prime
    member = np.zeros(work.shape[1], dtype=np.int64)
    for ci, row in zip(coords, work):
        if ci:
            member = (member + ci * row) % prime
    return np.where(member > prime // 2, member - prime, member)


def _edge_graph_vertices(view, eqs, state, budget):
    """Resolve stalled norm-2 residuals by walking their member graph.

    Each distinct open residual of norm 2 is the sum of two unresolved
    members, so the residuals form edges of a graph whose adjacency is
    visible directly: at the defining cell of an edge every member off
    that edge vanishes, hence another edge's residual shows 1 there
    exactly when the two edges share a member.  Components are walked
    off a spanning tree; an odd cycle determines the base member by an
    alternating sum, and bipartite components pin their one remaining
    matrix parameter through the span of the tensor, solved modulo two
    primes that must agree.  Returns the recovered members, possibly
    from only some components.
    """
    open_idx = np.nonzero(~state.explained)[0]
    if open_idx.size == 0:
        return []
    fam = state.family_stack()
    if fam is None:
        uleft = eqs.norm[open_idx].copy()
    else:
        stack, mults = fam
        cells = stack[:, eqs.mb[open_idx], eqs.nb[open_idx]]
        uleft = eqs.norm[open_idx] - (mults[:, None] * cells * cells).sum(axis=0)
    edges = []
    cellflats = []
    seen = set()
    size = view.size
    for e in open_idx[uleft == 2]:
        resid = eqs.residual(int(e), state)
        if resid.min() < 0:
            return []
        key = resid.tobytes()
        if key in seen:
            continue
        seen.add(key)
        edges.append(resid)
        cellflats.append(int(eqs.mb[e]) * size + int(eqs.nb[e]))
    count = len(edges)
    if count == 0:
        return []
    flat = np.stack([r.ravel() for r in edges])
    adjacent = flat[:, cellflats].T == 1
    np.fill_diagonal(adjacent, False)

    assigned = -np.ones(count, dtype=np.int64)
    components = []
    for start in range(count):
        if assigned[start] >= 0:
            continue
        queue = [start]
        assigned[start] = len(components)
        members = [start]
        while queue:
            i = queue.pop()
            for j in np.nonzero(adjacent[i])[0]:
                if assigned[j] < 0:
                    assigned[j] = len(components)
                    queue.append(int(j))
                    members.append(int(j))
        components.append(members)

    # Split each edge's neighbors into the two groups that meet it in
    # the same member: groups are mutual cliques with no cross links,
    # anything else (a triangle in the member graph) is left alone.
    sides = {}
    for i in range(count):
        groups = [[], []]
        clean = True
        for j in np.nonzero(adjacent[i])[0]:
            j = int(j)
            hits = [g for g in range(2) if any(adjacent[j, k] for k in groups[g])]
            if len(hits) > 1:
                clean = False
                break
            g = hits[0] if hits else (0 if not groups[0] else 1)
            if groups[g] and not all(adjacent[j, k] for k in groups[g]):
                clean = False
                break
            groups[g].append(j)
        if clean:
            sides[i] = groups

    parent = {}

    def find(node):
        while parent.setdefault(node, node) != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for i, groups in sides.items():
        for s, group in enumerate(groups):
            for j in group:
                if j not in sides:
                    continue
                back = [g for g in range(2) if i in sides[j][g]]
                if len(back) == 1:
                    parent[find((i, s))] = find((j, back[0]))

    recovered = []
    for members in components:
        if any(i not in sides for i in members):
            continue
        root = find((members[0], 0))
        offs = {root: np.zeros((size, size), dtype=np.int64)}
        sign = {root: 1}
        pend = list(members)
        direct = None
        consistent = True
        while pend and consistent:
            rest = []
            moved = False
            for i in pend:
                u, v = find((i, 0)), find((i, 1))
                if u == v:
                    consistent = False
                    break
                if u in offs and v in offs:
                    if sign[u] + sign[v] == 0:
                        consistent = np.array_equal(offs[u] + offs[v], edges[i])
                    else:
                        twice = edges[i] - offs[u] - offs[v]
                        if (twice % 2).any():
                            consistent = False
                        else:
                            candidate = (sign[u] + sign[v]) // 2 * twice // 2
                            if direct is not None and not np.array_equal(
                                direct, candidate
                            ):
                                consistent = False
                            direct = candidate
                    moved = True
                elif u in offs or v in offs:
                    known, fresh = (u, v) if u in offs else (v, u)
                    offs[fresh] = edges[i] - offs[known]
                    sign[fresh] = -sign[known]
                    moved = True
                else:
                    rest.append(i)
            if not consistent or not moved:
                break
            pend = rest
        if not consistent or pend:
            continue
        lows = np.zeros((size, size), dtype=np.int64)
        highs = np.full((size, size), np.iinfo(np.int64).max, dtype=np.int64)
        for vertex, off in offs.items():
            if sign[vertex] > 0:
                lows = np.maximum(lows, -off)
            else:
                highs = np.minimum(highs, off)
        feasible = True
        for k in range(count):
            want = 1 if k in members and root in (find((k, 0)), find((k, 1))) else 0
            cell = divmod(cellflats[k], size)
            if lows[cell] <= want <= highs[cell]:
                lows[cell] = highs[cell] = want
            else:
                feasible = False
                break
        if not feasible or (lows > highs).any():
            continue
        if direct is not None:
            base = direct
        else:
            fixed = (lows == highs).ravel()
            lifts = []
            for prime in _RANK_PRIMES:
                lift = _solve_span_member(
                    view.span_rows(prime), prime, fixed, lows.ravel()
                )
                if lift is None:
                    break
                lifts.append(lift.reshape(size, size))
            if len(lifts) < 2 or not np.array_equal(lifts[0], lifts[1]):
                continue
            base = lifts[0]
        if (base < lows).any() or (base > highs).any():
            continue
        for vertex, off in offs.items():
            recovered.append(off + sign[vertex] * base)
    if state.total + len(recovered) > budget:
        return []
    return recovered


def _validate(state, budget, vacuum_key):
    if state.total != budget:
        return False
    if state.mults[state.keys[vacuum_key]] != 1:
        return False
    for matrix, mult in zip(state.members, state.mults):
        partner = state.keys.get(
            np.ascontiguousarray(matrix.T).astype(np.int32).tobytes()
        )
        if partner is None or state.mults[partner] != mult:
            return False
    return True


def _family_explains(view, stack, mults):
    """Vectorized check of every cell equation against a family stack."""
    r = view.size
    flat = stack.reshape(len(stack), -1)
    for m in range(r):
        mb = view.conj[m]
        coefs = (mults[:, None] * stack[:, mb, :][:, view.conj]).T
        predicted = coefs @ flat
        actual = view._stack[view._pair_id[m]].reshape(r, -1).astype(np.float64)
        if not np.array_equal(predicted, actual):
            bad = np.nonzero((predicted != actual).any(axis=1))[0]
            n = int(bad[0])
            return False, (m, n), int(
                np.count_nonzero(predicted[n] - actual[n])
            )
    return True, None, 0


def _modp_rank(rows, prime):
    work = (rows % prime).astype(np.int64)
    pivots = []
    for row in work:
        row = row.copy()
        for col, pivrow in pivots:
            if row[col]:
                row = (row - row[col] * pivrow) % prime
        support = np.nonzero(row)[0]
        if support.size == 0:
            continue
        col = int(support[0])
        inv = pow(int(row[col]), prime - 2, prime)
        pivots.append((col, (row * inv) % prime))
    return len(pivots)


def extract_toric(view, expected_total=None, exhaustive=False):
    """Recover the toric family from the splitting equations.

    The forced rules run to a fixpoint over every cell equation; on a
    stall, open equations are scanned in order and the first one that
    admits a single-matrix factorization of its residual branches over
    the candidates, with the remaining open equations tried next when
    all of those branches fail.  A branch is accepted once every
    equation closes, the family total reaches expected_total (the
    squared sum of the invariant by default), the vacuum member keeps
    multiplicity one, the family is closed under transposition, and a
    full re-expansion of the tensor succeeds.  With exhaustive set the
    search enumerates every acceptable family instead of stopping at
    the first one and raises when they disagree.

    An explicit expected_total below the rank of the span of the cell
    matrices is rejected outright: the distinct members of any
    explaining family must span every K matrix, so no family that
    small can exist.
    """
    view._ensure()
    budget = expected_total
    if budget is None:
        budget = int((view.matrix.astype(np.int64) ** 2).sum())
    elif budget < _modp_rank(
        view._stack.reshape(len(view._stack), -1), _RANK_PRIMES[0]
    ):
        raise IncompleteFamilyError(
            "a family of total size %d cannot span the %s tensor"
            % (budget, view.name)
        )
    eqs = _Equations(view)
    vacuum_key = view.matrix.astype(np.int32).tobytes()
    results = []
    seen_signatures = set()
    visited = set()

    def record(state):
        sig = state.signature()
        if sig in seen_signatures:
            return
        stack, mults = state.family_stack()
        ok, _, _ = _family_explains(view, stack.astype(np.float64),
                                    mults.astype(np.float64))
        if ok:
            seen_signatures.add(sig)
            results.append(state)

    def search(state):
        if not _run_sweeps(eqs, state, budget):
            return
        open_idx = np.nonzero(~state.explained)[0]
        if open_idx.size == 0:
            if _validate(state, budget, vacuum_key):
                record(state)
            return
        node = state.signature()
        if node in visited:
            return
        visited.add(node)
        for e in open_idx:
            _, candidates = _stall_candidates(eqs, state, budget, int(e))
            for matrix, mult in candidates:
                branch = state.clone()
                branch.absorb(matrix, mult)
                branch.explained[e] = True
                search(branch)
                if results and not exhaustive:
                    return
        vertices = _edge_graph_vertices(view, eqs, state, budget)
        if vertices:
            branch = state.clone()
            for matrix in vertices:
                branch.absorb(matrix, 1)
            search(branch)

    search(_State(eqs.count))
    if not results:
        raise IncompleteFamilyError(
            "no toric family of total size %d explains the %s tensor"
            % (budget, view.name)
        )
    if exhaustive and len(results) > 1:
        branches = [
            {
                "distinct": len(state.members),
                "histogram": dict(sorted(Counter(state.mults).items())),
            }
            for state in results
        ]
        raise AmbiguousDecompositionError(
            "%d inequivalent toric families of total size %d explain the %s tensor"
            % (len(results), budget, view.name),
            branches,
        )
    state = results[0]
    flat = np.stack(state.members).reshape(len(state.members), -1)
    ranks = {_modp_rank(flat, p) for p in _RANK_PRIMES}
    assert len(ranks) == 1, "rank must agree across primes"
    matrices = [SparseNatMatrix.from_numpy(mat) for mat in state.members]
    return ToricFamily(
        matrices, state.mults, state.keys[vacuum_key], ranks.pop()
    )


def verify_modular_splitting(view, family):
    """Check every cell equation K[m, n] = sum_x W_x[mb, nb] W_x.

    Returns (ok, report); on failure the report names the first
    violating cell in row-major order.
    """
    view._ensure()
    stack = np.stack([mat.to_numpy() for mat in family.matrices]).astype(np.float64)
    mults = np.array(family.multiplicities, dtype=np.float64)
    assert stack.max() * mults.max() * len(family) * stack.max() < _EXACT_BOUND
    ok, pair, nonzeros = _family_explains(view, stack, mults)
    if not ok:
        return False, {
            "pairs_checked": pair[0] * view.size + pair[1],
            "violating_pair": pair,
            "residual_nonzeros": nonzeros,
        }
    return True, {"pairs_checked": view.size ** 2, "violating_pair": None}
