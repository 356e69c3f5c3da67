"""Root data for the simple Lie algebras of type A, B, D and level-k alcoves.

Weights are tuples of Dynkin labels (coordinates on the fundamental weights),
roots are tuples of coordinates on the simple roots.  The invariant bilinear
form is normalised so that long roots have squared length 2; the matrix of the
form on the fundamental weights is then F = A^(-1) D with A the Cartan matrix
and D = diag((alpha_j, alpha_j)/2).  Everything is exact: inner products are
Fractions and quantum dimensions are cyclotomic numbers.
"""

from fractions import Fraction
from functools import lru_cache

from . import exactla
from .cyclo import CycloNumber, qnumber_frac


def _cartan_matrix(series, rank):
    a = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for i in range(rank - 1):
        a[i][i + 1] = -1
        a[i + 1][i] = -1
    if series == "B":
        # the last simple root is short; A_ij = 2(alpha_i, alpha_j)/(alpha_j, alpha_j)
        a[rank - 2][rank - 1] = -2
    elif series == "D":
        a[rank - 2][rank - 1] = 0
        a[rank - 1][rank - 2] = 0
        a[rank - 3][rank - 1] = -1
        a[rank - 1][rank - 3] = -1
    return a


class AffineAlgebraData:
    """Cartan matrix, roots, form and Weyl data for one algebra of type A/B/D.

    The quadratic form, positive roots, highest root, (co)marks and the dual
    Coxeter number are computed once in the constructor.  Weyl group
    enumeration is kept separate (`weyl_group`) because it is only affordable
    for small ranks; the modular generators need it for A3 alone.
    """

    def __init__(self, series, rank):
        assert series in ("A", "B", "D"), series
        assert rank >= (4 if series == "D" else 2 if series == "B" else 1)
        self.series = series
        self.rank = rank
        self.cartan = _cartan_matrix(series, rank)
        halfnorms = [Fraction(1)] * rank
        if series == "B":
            halfnorms[rank - 1] = Fraction(1, 2)
        self.halfnorms = tuple(halfnorms)
        inv = exactla.inverse(exactla.frac_matrix(self.cartan))
        self.quadratic_form = tuple(
            tuple(inv[i][j] * halfnorms[j] for j in range(rank)) for i in range(rank)
        )
        self.positive_roots = self._close_positive_roots()
        self.weyl_vector = (1,) * rank
        self.highest_root = max(self.positive_roots, key=sum)
        assert sum(1 for b in self.positive_roots if sum(b) == sum(self.highest_root)) == 1
        self.marks = self.highest_root
        comarks = [self.marks[j] * halfnorms[j] for j in range(rank)]
        assert all(c.denominator == 1 for c in comarks)
        self.comarks = tuple(int(c) for c in comarks)
        self.dual_coxeter = 1 + sum(self.comarks)

    def _close_positive_roots(self):
        rank = self.rank
        seen = {tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)}
        queue = list(seen)
        while queue:
            beta = queue.pop()
            for j in range(rank):
                pairing = sum(beta[i] * self.cartan[i][j] for i in range(rank))
                image = beta[:j] + (beta[j] - pairing,) + beta[j + 1:]
                if min(image) >= 0 and image not in seen:
                    seen.add(image)
                    queue.append(image)
        return tuple(sorted(seen, key=lambda b: (sum(b), b)))

    def pairing(self, lam, mu):
        """(lam, mu) for two weights in Dynkin labels."""
        f = self.quadratic_form
        return sum(
            Fraction(lam[i]) * f[i][j] * mu[j]
            for i in range(self.rank) for j in range(self.rank)
        )

    def root_pairing(self, lam, beta):
        """(lam, beta) for a weight lam and a root beta in simple-root coords."""
        return sum(Fraction(lam[j]) * beta[j] * self.halfnorms[j] for j in range(self.rank))

    def conjugate(self, lam):
        """Dynkin labels of the dual representation."""
        if self.series == "A":
            return tuple(reversed(lam))
        if self.series == "D" and self.rank % 2 == 1:
            return lam[:-2] + (lam[-1], lam[-2])
        return tuple(lam)

    def classical_dim(self, lam):
        rho = self.weyl_vector
        shifted = tuple(l + 1 for l in lam)
        num = Fraction(1)
        for beta in self.positive_roots:
            num *= self.root_pairing(shifted, beta) / self.root_pairing(rho, beta)
        assert num.denominator == 1
        return int(num)

    def weyl_group(self):
        """All elements as matrices on Dynkin labels, with signatures.

        Reflections act by s_j(lam)_i = lam_i - lam_j * A_ji.  Intended for
        small groups only (A3 has 24 elements); the big ambient algebras never
        need it because their quantum dimensions come from the Weyl product
        formula.
        """
        rank = self.rank
        gens = []
        for j in range(rank):
            m = [[1 if i == l else 0 for l in range(rank)] for i in range(rank)]
            for i in range(rank):
                m[i][j] -= self.cartan[j][i]
            gens.append(tuple(tuple(row) for row in m))
        identity = tuple(tuple(1 if i == l else 0 for l in range(rank)) for i in range(rank))
        elements = {identity: 1}
        frontier = [identity]
        while frontier:
            nxt = []
            for w in frontier:
                for g in gens:
                    prod = tuple(
                        tuple(sum(g[i][l] * w[l][j2] for l in range(rank)) for j2 in range(rank))
                        for i in range(rank)
                    )
                    if prod not in elements:
                        elements[prod] = -elements[w]
                        nxt.append(prod)
            frontier = nxt
        return list(elements.items())

    def act(self, w, lam):
        """Apply a Weyl group element (matrix from weyl_group) to a weight."""
        return tuple(sum(w[i][j] * lam[j] for j in range(self.rank)) for i in range(self.rank))


def _alcove_sort_key(algebra, lam):
    level = sum(c * l for c, l in zip(algebra.comarks, lam))
    return (level, tuple(-x for x in lam))


class Alcove:
    """Integrable weights of an affine algebra at a fixed level.

    Weights are ordered by level and then by decreasing lexicographic label,
    which puts the trivial weight first and reproduces the tables this package
    is checked against.
    """

    def __init__(self, algebra, level):
        assert level >= 0
        self.algebra = algebra
        self.level = level
        self.kappa = level + algebra.dual_coxeter
        self.weights = tuple(sorted(self._enumerate(), key=lambda w: _alcove_sort_key(algebra, w)))
        self._index = {w: i for i, w in enumerate(self.weights)}

    def _enumerate(self):
        comarks = self.algebra.comarks
        rank = self.algebra.rank
        out = []

        def rec(prefix, budget):
            i = len(prefix)
            if i == rank:
                out.append(tuple(prefix))
                return
            for v in range(budget // comarks[i] + 1):
                rec(prefix + [v], budget - v * comarks[i])

        rec([], self.level)
        return out

    def __len__(self):
        return len(self.weights)

    def index(self, lam):
        return self._index[tuple(lam)]

    def weight_level(self, lam):
        return sum(c * l for c, l in zip(self.algebra.comarks, lam))

    def conformal_weight(self, lam):
        """(lam, lam + 2 rho) / (2 kappa) as an exact Fraction."""
        value = self.algebra.pairing(lam, tuple(l + 2 for l in lam))
        return value / (2 * self.kappa)

    def quantum_dim(self, lam):
        """Quantum Weyl formula at q = exp(i pi / kappa)."""
        alg = self.algebra
        rho = alg.weyl_vector
        shifted = tuple(l + 1 for l in lam)
        num = CycloNumber.rational(1)
        den = CycloNumber.rational(1)
        for beta in alg.positive_roots:
            num = num * qnumber_frac(alg.root_pairing(shifted, beta), self.kappa)
            den = den * qnumber_frac(alg.root_pairing(rho, beta), self.kappa)
        return num / den

    def quantum_mass(self):
        """Sum of squared quantum dimensions over the alcove."""
        total = CycloNumber.rational(0)
        for lam in self.weights:
            d = self.quantum_dim(lam)
            total = total + d * d
        return total

    def fourality(self, lam):
        assert self.algebra.series == "A" and self.algebra.rank == 3
        return (lam[0] + 2 * lam[1] + 3 * lam[2]) % 4

    def conjugate_index(self, i):
        return self._index[self.algebra.conjugate(self.weights[i])]

    def dump(self):
        """JSON-ready description of the alcove."""
        rows = []
        for i, lam in enumerate(self.weights):
            h = self.conformal_weight(lam)
            row = {
                "index": i,
                "label": list(lam),
                "level": self.weight_level(lam),
                "conformal_weight": "%d/%d" % (h.numerator, h.denominator),
                "quantum_dim": self.quantum_dim(lam).to_json(),
            }
            if self.algebra.series == "A" and self.algebra.rank == 3:
                row["fourality"] = self.fourality(lam)
            rows.append(row)
        return {
            "series": self.algebra.series,
            "rank": self.algebra.rank,
            "level": self.level,
            "kappa": self.kappa,
            "size": len(self.weights),
            "weights": rows,
        }


@lru_cache(maxsize=None)
def su4_algebra():
    return AffineAlgebraData("A", 3)


@lru_cache(maxsize=None)
def su4_alcove(level):
    return Alcove(su4_algebra(), level)
