"""Exact modular generator matrices s and t for special unitary models.

Every entry of s is an algebraic integer divided by g*kappa^rank, held
as a cyclotomic number.  The matrix is assembled from the determinant
form: entry (m, n) is a signed sum over permutations of g symbols of
roots of unity whose exponents are integer bilinear expressions in the
shifted weights, so the whole construction runs on integer arrays and
only converts to exact field elements at the end.

The defining relations (unitarity, symmetry, (st)^3 = s^2 = charge,
t^(2 g kappa) = 1) are proved rather than spot-checked: each identity
is evaluated in every embedding of the cyclotomic field into prime
fields F_p with p = 1 mod conductor, for enough primes that the Chinese
remainder theorem pins the integer coefficients of the difference to
zero.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import gcd, isqrt, lcm

import numpy as np

from .cyclo import CycloNumber, euler_phi, sqrt_int, zeta
from .fusion import SparseNatMatrix

_PRIME_CEILING = 2 ** 21  # keeps float64 matrix products exact


class ModularRep:
    """Exact s and t matrices over one alcove.

    smat is a square list-of-lists of CycloNumber, tphases the diagonal
    of t, charge the conjugation permutation matrix.  The integer
    coefficient tensor behind s (entry = sint[m][n] / den in the power
    basis of the conductor) is kept alongside for fast exact checks.
    """

    def __init__(self, alcove, smat, tphases, charge, conductor, sint, den, texp):
        self.alcove = alcove
        self.level = alcove.level
        self.smat = smat
        self.tphases = tphases
        self.charge = charge
        self.conductor = conductor
        self.sint = sint
        self.den = den
        self.texp = texp
        self.conjugation = tuple(alcove.conjugate_index(i) for i in range(len(alcove)))

    def __len__(self):
        return len(self.smat)

    def dump(self, floats=False):
        if floats:
            s = [[repr(x.complex_value()) for x in row] for row in self.smat]
            t = [repr(x.complex_value()) for x in self.tphases]
        else:
            s = [[x.to_json() for x in row] for row in self.smat]
            t = [x.to_json() for x in self.tphases]
        return {
            "version": 1,
            "level": self.level,
            "conductor": self.conductor,
            "s": s,
            "t": t,
            "conjugation": list(self.conjugation),
        }


def _phase(fr):
    """e^(2 pi i fr) for a rational fr, as an exact root of unity."""
    fr = Fraction(fr)
    return zeta(fr.denominator, fr.numerator % fr.denominator)


def _psi(g, m):
    """Integer coordinates g*phi_a(m+rho) of the shifted weight, summing to 0."""
    mm = [x + 1 for x in m]
    drift = sum(s * mm[s - 1] for s in range(1, g))
    out = [g * sum(mm[s - 1] for s in range(a, g)) - drift for a in range(1, g + 1)]
    assert sum(out) == 0
    return out


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _zeta_basis(n):
    """Reduced power-basis rows of zeta_n^e for e = 0..n-1, as integers."""
    rows = []
    for e in range(n):
        coeffs = zeta(n, e).coeffs
        assert all(c.denominator == 1 for c in coeffs)
        rows.append([int(c) for c in coeffs])
    table = np.array(rows, dtype=np.int64)
    red = int(np.abs(table).sum(axis=1).max())
    return table, red


def _is_prime(n):
    if n < 2:
        return False
    for q in range(2, isqrt(n) + 1):
        if n % q == 0:
            return False
    return True


def _split_primes(modulus, need):
    """Primes p = 1 mod modulus whose product exceeds `need`, largest first."""
    found, prod = [], 1
    p = ((_PRIME_CEILING - 2) // modulus) * modulus + 1
    while p > modulus and prod <= need:
        if _is_prime(p):
            found.append(p)
            prod *= p
        p -= modulus
    assert prod > need, "prime budget exhausted"
    return found


def _root_of_order(p, order):
    assert (p - 1) % order == 0
    factors = set()
    q, left = 2, order
    while q * q <= left:
        while left % q == 0:
            factors.add(q)
            left //= q
        q += 1
    if left > 1:
        factors.add(left)
    x = 2
    while True:
        w = pow(x, (p - 1) // order, p)
        if w != 1 and all(pow(w, order // q, p) != 1 for q in factors):
            return w
        x += 1


def _matmod(a, b, p):
    """Exact (a @ b) mod p via float64, valid while entries stay below 2^53."""
    prod = a.astype(np.float64) @ b.astype(np.float64)
    assert np.abs(prod).max() < 2 ** 53
    return np.rint(prod).astype(np.int64) % p


def _embedded_smatrices(rep, p):
    """The image of sint under every embedding zeta -> w^a of the field in F_p."""
    n = rep.conductor
    phi = euler_phi(n)
    w = _root_of_order(p, n)
    flat = rep.sint.reshape(-1, phi)
    out = {}
    for a in range(1, n):
        if gcd(a, n) != 1:
            continue
        powvec = np.array([pow(w, a * i % n, p) for i in range(phi)], dtype=np.int64)
        out[a] = (flat @ powvec % p).reshape(rep.sint.shape[0], -1)
    return w, out


def build_tmatrix(alcove):
    """Diagonal of the t matrix as exact roots of unity."""
    alg = alcove.algebra
    g = alg.dual_coxeter
    rho2 = alg.pairing(alg.weyl_vector, alg.weyl_vector)
    phases = []
    for m in alcove.weights:
        shifted = tuple(x + 1 for x in m)
        f = alg.pairing(shifted, shifted) / (2 * alcove.kappa) - rho2 / (2 * g)
        phases.append(_phase(f))
    return phases


def _texponents(alcove):
    alg = alcove.algebra
    g = alg.dual_coxeter
    rho2 = alg.pairing(alg.weyl_vector, alg.weyl_vector)
    out = []
    for m in alcove.weights:
        shifted = tuple(x + 1 for x in m)
        f = alg.pairing(shifted, shifted) / (2 * alcove.kappa) - rho2 / (2 * g)
        out.append(f % 1)
    return out


def build_smatrix(alcove, verify=True):
    """Exact Kac-Peterson s matrix of SU(g) at the alcove's level.

    Uses the determinant form, so only A-series alcoves are accepted.
    The returned ModularRep carries s, t, and the charge matrix; with
    verify=True all defining relations are established exactly before
    returning.
    """
    alg = alcove.algebra
    assert alg.series == "A", "determinant form is specific to special unitary algebras"
    rank = alg.rank
    g = rank + 1
    kappa = alcove.kappa
    size = len(alcove)
    den = g * kappa ** rank

    mult = CycloNumber.root_of_unity(4, (rank * g // 2) % 4) * sqrt_int(den)
    cond = lcm(g * g * kappa, mult.conductor)
    scale = cond // (g * g * kappa)
    mult = mult.promote(cond)
    assert all(c.denominator == 1 for c in mult.coeffs)

    psi = np.array([_psi(g, m) for m in alcove.weights], dtype=np.int64)
    counts = np.zeros((size * size, cond), dtype=np.int64)
    cells = np.arange(size * size)
    for perm in permutations(range(g)):
        sign = _perm_sign(perm)
        expo = (-(psi @ psi[:, perm].T) * scale) % cond
        np.add.at(counts, (cells, expo.reshape(-1)), sign)

    # fold the scalar prefactor in at the exponent level: multiplying by
    # zeta^i shifts every accumulated exponent by i
    folded = np.zeros_like(counts)
    for i, c in enumerate(mult.coeffs):
        if c:
            folded += int(c) * np.roll(counts, i, axis=1)

    table, _ = _zeta_basis(cond)
    phi = euler_phi(cond)
    flat = folded.astype(np.float64) @ table.astype(np.float64)
    assert np.abs(flat).max() < 2 ** 53
    sint = np.rint(flat).astype(np.int64).reshape(size, size, phi)

    smat = [[CycloNumber(cond, [Fraction(int(v), den) for v in sint[m, n]])
             for n in range(size)] for m in range(size)]

    tphases = build_tmatrix(alcove)
    texp = _texponents(alcove)
    for f in texp:
        assert (f * cond).denominator == 1, "t phase outside the working field"

    perm = [alcove.conjugate_index(i) for i in range(size)]
    charge = SparseNatMatrix(size, size, {(i, perm[i]): 1 for i in range(size)})

    rep = ModularRep(alcove, smat, tphases, charge, cond, sint, den, texp)
    if verify:
        verify_modular_relations(rep)
    return rep


def verify_modular_relations(rep):
    """Prove unitarity, symmetry, (st)^3 = s^2 = C, C^2 = 1, t^(2g kappa) = 1."""
    alcove = rep.alcove
    g = alcove.algebra.dual_coxeter
    size = len(rep)
    sint = rep.sint
    den = rep.den
    cond = rep.conductor

    assert np.array_equal(sint, sint.transpose(1, 0, 2)), "s must be symmetric"

    for f in rep.texp:
        assert (2 * g * alcove.kappa * f).denominator == 1, "t order too large"

    perm = rep.conjugation
    assert all(perm[perm[i]] == i for i in range(size)), "charge must be an involution"
    cmat = np.zeros((size, size), dtype=np.int64)
    for i, j in enumerate(perm):
        cmat[i, j] = 1

    _, red = _zeta_basis(cond)
    height = int(np.abs(sint).sum(axis=2).max())
    bound = size * size * height ** 3 * red
    eye = np.eye(size, dtype=np.int64)
    for p in _split_primes(cond, 2 * bound):
        assert size * (p - 1) ** 2 < 2 ** 53
        w, emb = _embedded_smatrices(rep, p)
        d2 = den * den % p
        for a, s_a in emb.items():
            s_conj = emb[cond - a]
            assert np.array_equal(_matmod(s_a, s_conj.T, p), d2 * eye % p), "not unitary"
            s_sq = _matmod(s_a, s_a, p)
            assert np.array_equal(s_sq, d2 * cmat % p), "s^2 is not the charge"
            tvec = np.array([pow(w, int(a * f * cond) % cond, p) for f in rep.texp],
                            dtype=np.int64)
            st = s_a * tvec[None, :] % p
            cube = _matmod(_matmod(st, st, p), st, p)
            assert np.array_equal(cube, den * s_sq % p), "(st)^3 differs from s^2"


def commutes_with_modular(matrix, rep):
    """True iff the matrix commutes exactly with both s and t."""
    size = len(rep)
    assert matrix.nrows == matrix.ncols == size, "dimension mismatch"
    for (m, n) in matrix.entries:
        if rep.texp[m] != rep.texp[n]:
            return False
    dense = matrix.to_numpy()
    left = np.tensordot(dense, rep.sint, axes=(1, 0))
    right = np.tensordot(rep.sint, dense, axes=(1, 0)).transpose(0, 2, 1)
    return bool(np.array_equal(left, right))


def smatrix_weyl_sum(alcove):
    """The s matrix from the sum over the Weyl group, for cross-checking.

    Far slower than the determinant form; intended for small alcoves.
    """
    alg = alcove.algebra
    assert alg.series == "A"
    rank = alg.rank
    g = rank + 1
    kappa = alcove.kappa
    den = g * kappa ** rank
    pref = CycloNumber.root_of_unity(4, (rank * g // 2) % 4) * sqrt_int(den)
    group = alg.weyl_group()
    shifted = [tuple(x + 1 for x in m) for m in alcove.weights]
    images = [[(alg.act(w, mp), sign) for w, sign in group] for mp in shifted]
    out = []
    for m, mp in enumerate(shifted):
        row = []
        for n, npp in enumerate(shifted):
            total = CycloNumber.rational(0)
            for wm, sign in images[m]:
                f = -alg.pairing(wm, npp) / kappa
                total = total + sign * _phase(f)
            row.append(pref * total / den)
        out.append(row)
    return out


def verlinde_matches_fusion(rep, fusion_data, rows=None):
    """Check that s diagonalizes the fusion matrices with spectrum s_mr/s_0r.

    Verifies (N_m s)_nr * s_0r = s_nr * s_mr exactly, for the requested
    alcove rows (all of them by default), through the same split-prime
    embedding argument used for the defining relations.
    """
    size = len(rep)
    assert len(fusion_data.matrices) == size
    if rows is None:
        rows = range(size)
    rows = list(rows)
    dense = {m: fusion_data.matrices[m].to_numpy() for m in rows}
    maxn = max(max(mat.max() for mat in dense.values()), 1)
    _, red = _zeta_basis(rep.conductor)
    height = int(np.abs(rep.sint).sum(axis=2).max())
    bound = size * maxn * height ** 2 * red
    for p in _split_primes(rep.conductor, 2 * bound):
        _, emb = _embedded_smatrices(rep, p)
        for a, s_a in emb.items():
            for m in rows:
                lhs = _matmod(dense[m], s_a, p) * s_a[0][None, :] % p
                rhs = s_a * s_a[m][None, :] % p
                if not np.array_equal(lhs, rhs):
                    return False
    return True


@lru_cache(maxsize=None)
def su4_modular(level):
    from .liealg import su4_alcove
    return build_smatrix(su4_alcove(level))
