"""Root data and alcove checks against published tables."""

import json
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from su4sym.cyclo import CycloNumber, qnumber, sqrt_int, to_float, zeta
from su4sym.liealg import AffineAlgebraData, Alcove, su4_alcove


def load_reference():
    with resources.files("su4sym.data").joinpath("reference.json").open() as fh:
        return json.load(fh)


REF = load_reference()

A3 = AffineAlgebraData("A", 3)
B7 = AffineAlgebraData("B", 7)
A9 = AffineAlgebraData("A", 9)
D10 = AffineAlgebraData("D", 10)

AMBIENT = {"e4": B7, "e6": A9, "e8": D10}


def root_form(spec):
    """Evaluate scale*(a + b*sqrt(root)) exactly."""
    return CycloNumber.rational(spec["scale"]) * (
        CycloNumber.rational(spec["a"]) + CycloNumber.rational(spec["b"]) * sqrt_int(spec["root"])
    )


def test_cartan_symmetrizable():
    for alg in (A3, B7, A9, D10):
        r = alg.rank
        for i in range(r):
            for j in range(r):
                lhs = alg.cartan[i][j] * alg.halfnorms[j]
                rhs = alg.cartan[j][i] * alg.halfnorms[i]
                assert lhs == rhs


def test_positive_root_counts():
    assert len(A3.positive_roots) == 6
    assert len(B7.positive_roots) == 49
    assert len(A9.positive_roots) == 45
    assert len(D10.positive_roots) == 90


def test_height_multisets_match_weyl_denominator_exponents():
    ref = REF["appendix"]
    for alg, key in ((A3, "a3_height_multiset"), (D10, "d10_height_multiset")):
        heights = {}
        for beta in alg.positive_roots:
            h = alg.root_pairing(alg.weyl_vector, beta)
            assert h.denominator == 1
            heights[str(h)] = heights.get(str(h), 0) + 1
        assert heights == ref[key]


def test_weyl_vector_norms_and_dual_coxeter():
    assert A3.pairing(A3.weyl_vector, A3.weyl_vector) == 5
    assert A3.dual_coxeter == 4
    assert B7.dual_coxeter == 13
    assert A9.dual_coxeter == 10
    assert D10.dual_coxeter == 18
    for alg in (A3, B7, A9, D10):
        theta = alg.highest_root
        assert alg.root_pairing(alg.weyl_vector, theta) == alg.dual_coxeter - 1
        # theta is long: squared length 2
        sq = sum(
            Fraction(theta[i]) * theta[j] * alg.cartan[i][j] * alg.halfnorms[j]
            for i in range(alg.rank) for j in range(alg.rank)
        )
        assert sq == 2


def test_comarks():
    assert A3.comarks == (1, 1, 1)
    assert B7.comarks == (1, 2, 2, 2, 2, 2, 1)
    assert A9.comarks == (1,) * 9
    assert D10.comarks == (1, 2, 2, 2, 2, 2, 2, 2, 1, 1)


def test_classical_dims():
    assert A3.classical_dim((1, 0, 0)) == 4
    assert A3.classical_dim((0, 1, 0)) == 6
    assert A3.classical_dim((1, 0, 1)) == 15
    assert A3.classical_dim((1, 1, 1)) == 64
    assert A3.classical_dim((1, 2, 1)) == 175
    assert A3.classical_dim((2, 0, 2)) == 84
    assert B7.classical_dim((0, 1, 0, 0, 0, 0, 0)) == 105
    assert B7.classical_dim((1, 0, 0, 0, 0, 0, 0)) == 15
    assert B7.classical_dim((0, 0, 0, 0, 0, 0, 1)) == 128
    assert A9.classical_dim((1, 0, 0, 0, 0, 0, 0, 0, 1)) == 99
    assert D10.classical_dim((0, 1, 0, 0, 0, 0, 0, 0, 0, 0)) == 190
    assert D10.classical_dim((1,) + (0,) * 9) == 20


def test_conjugation():
    assert A3.conjugate((1, 2, 3)) == (3, 2, 1)
    assert B7.conjugate((1, 0, 0, 0, 0, 0, 1)) == (1, 0, 0, 0, 0, 0, 1)
    assert D10.conjugate((0,) * 8 + (1, 0)) == (0,) * 8 + (1, 0)
    assert A9.conjugate((1,) + (0,) * 8) == (0,) * 8 + (1,)


def test_alcove_sizes_and_order():
    for name, level, size in (("e4", 4, 35), ("e6", 6, 84), ("e8", 8, 165)):
        alc = su4_alcove(level)
        assert len(alc) == size
        assert alc.weights[0] == (0, 0, 0)
        expected = [Fraction(s) for s in REF["cases"][name]["alcove_h"]]
        got = [alc.conformal_weight(w) for w in alc.weights]
        assert got == expected


def test_ambient_level1_conformal_weights():
    for name, alg in AMBIENT.items():
        alc = Alcove(alg, 1)
        expected = [Fraction(s) for s in REF["cases"][name]["ambient"]["level1_h"]]
        got = [alc.conformal_weight(w) for w in alc.weights]
        assert got == expected


def test_su4_fundamental_quantum_dims():
    # dim(100) = dim(001) = [4]_q and dim(010) = [3][4]/[2]; the squared
    # values 2(2+sqrt2), 5+2 sqrt5, 3(2+sqrt3) are the printed Jones indices.
    beta_sq = {4: (2, 2, 1, 2), 6: (1, 5, 2, 5), 8: (3, 2, 1, 3)}  # scale, a, b, root
    middle = {4: (2, 2), 6: (2, 5), 8: (3, 3)}  # a + sqrt(root)
    for level in (4, 6, 8):
        alc = su4_alcove(level)
        d100 = alc.quantum_dim((1, 0, 0))
        d010 = alc.quantum_dim((0, 1, 0))
        d001 = alc.quantum_dim((0, 0, 1))
        assert d100 == d001 == qnumber(4, alc.kappa)
        scale, a, b, root = beta_sq[level]
        assert d100 * d100 == root_form(
            {"scale": scale, "a": a, "b": b, "root": root})
        a, root = middle[level]
        assert d010 == CycloNumber.rational(a) + sqrt_int(root)
        assert d010 == qnumber(3, alc.kappa) * qnumber(4, alc.kappa) / qnumber(2, alc.kappa)


def test_beta_product_form():
    # [4]_q = 4 cos(pi/kappa) cos(2 pi/kappa)
    for level in (4, 6, 8):
        kappa = level + 4
        c1 = zeta(2 * kappa) + zeta(2 * kappa, -1)  # 2 cos(pi/kappa)
        c2 = zeta(kappa) + zeta(kappa, -1)  # 2 cos(2 pi/kappa)
        assert qnumber(4, kappa) == c1 * c2


def test_weyl_denominator_values():
    ref = REF["appendix"]["a3_weyl_denominator"]
    for level in (4, 6, 8):
        kappa = level + 4
        value = CycloNumber.rational(1)
        for beta in A3.positive_roots:
            value = value * qnumber(int(A3.root_pairing(A3.weyl_vector, beta)), kappa)
        assert value == root_form(ref[str(level)])


def test_su4_quantum_masses():
    for name, level in (("e4", 4), ("e6", 6), ("e8", 8)):
        alc = su4_alcove(level)
        assert alc.quantum_mass() == root_form(REF["cases"][name]["cardinality_A"])


def test_mass_closed_form():
    # 4 kappa^3 = |A_k| * 2^16 cos^4(pi/kappa) (2 cos(2 pi/kappa)+1)^2 sin^12(pi/kappa)
    for level in range(1, 9):
        kappa = level + 4
        mass = Alcove(A3, level).quantum_mass()
        two_cos = zeta(2 * kappa) + zeta(2 * kappa, -1)
        two_isin = zeta(2 * kappa) - zeta(2 * kappa, -1)
        cos2 = zeta(kappa) + zeta(kappa, -1)
        cos_factor = (two_cos ** 4) * CycloNumber.rational(Fraction(1, 16))
        sin_factor = (two_isin ** 12) * CycloNumber.rational(Fraction(1, 4096))
        rhs = mass * CycloNumber.rational(2 ** 16) * cos_factor * (
            (cos2 + 1) ** 2) * sin_factor
        assert rhs == CycloNumber.rational(4 * kappa ** 3)


def test_ambient_level1_masses():
    for name, alg in AMBIENT.items():
        alc = Alcove(alg, 1)
        mass = alc.quantum_mass()
        assert mass == CycloNumber.rational(REF["cases"][name]["A1_mass"])


def test_b7_level1_quantum_dims():
    alc = Alcove(B7, 1)
    expected = REF["appendix"]["b7_level1_qdim_sq"]
    for w, sq in zip(alc.weights, expected):
        d = alc.quantum_dim(w)
        assert d * d == CycloNumber.rational(sq)


def test_d10_fundamental_quantum_dims():
    alc = Alcove(D10, 1)
    expected = REF["appendix"]["d10_fundamental_qdims"]
    for i in range(10):
        lam = tuple(1 if j == i else 0 for j in range(10))
        assert alc.quantum_dim(lam) == CycloNumber.rational(expected[i])


def test_d10_fundamental_ratio_forms():
    # dim(omega_i) = prod [num]/prod [den] must agree with the Weyl product:
    # as multisets, {(omega_i+rho, alpha)} + den = {(rho, alpha)} + num.
    ratios = REF["appendix"]["d10_fundamental_qdim_ratios"]
    rho = D10.weyl_vector
    rho_side = sorted(D10.root_pairing(rho, b) for b in D10.positive_roots)
    for key, (num, den) in ratios.items():
        i = int(key) - 1
        lam = tuple(2 if j == i else 1 for j in range(10))
        lam_side = sorted(D10.root_pairing(lam, b) for b in D10.positive_roots)
        assert sorted(lam_side + [Fraction(x) for x in den]) == sorted(
            rho_side + [Fraction(x) for x in num])


def test_cardinality_square_identity():
    # |E_k|^2 = |A_k| * |A_1(ambient)| for all three conformal embeddings
    for name, level in (("e4", 4), ("e6", 6), ("e8", 8)):
        case = REF["cases"][name]
        e = root_form(case["cardinality_E"])
        a = root_form(case["cardinality_A"])
        assert e * e == a * CycloNumber.rational(case["A1_mass"])


def test_fourality():
    alc = su4_alcove(4)
    assert alc.fourality((0, 0, 0)) == 0
    assert alc.fourality((1, 0, 0)) == 1
    assert alc.fourality((0, 1, 0)) == 2
    assert alc.fourality((0, 0, 1)) == 3
    assert alc.fourality((1, 1, 1)) == 2


def test_weyl_group_small():
    a1 = AffineAlgebraData("A", 1)
    assert len(a1.weyl_group()) == 2
    group = A3.weyl_group()
    assert len(group) == 24
    assert sum(sign for _, sign in group) == 0
    # the longest element acts as minus conjugation on weights
    lam = (3, 1, 2)
    images = {A3.act(w, lam) for w, _ in group}
    assert len(images) == 24
    assert tuple(-x for x in reversed(lam)) in images


def test_classical_limit_of_quantum_dims():
    # at large level the quantum dimension approaches the classical one
    alc = Alcove(A3, 60)
    for lam in ((1, 0, 0), (1, 2, 1)):
        q = to_float(alc.quantum_dim(lam))
        c = A3.classical_dim(lam)
        assert abs(q - c) / c < 0.05


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_alcove_involution_properties(l1, l2, l3):
    lam = (l1, l2, l3)
    alc = su4_alcove(6)
    if sum(lam) > 6:
        return
    conj = A3.conjugate(lam)
    assert alc.conformal_weight(lam) == alc.conformal_weight(conj)
    assert A3.classical_dim(lam) == A3.classical_dim(conj)
    assert alc.quantum_dim(lam) == alc.quantum_dim(conj)
    assert (alc.fourality(lam) + alc.fourality(conj)) % 4 == 0


def test_dump_shape():
    alc = su4_alcove(4)
    doc = alc.dump()
    assert doc["size"] == 35
    assert doc["weights"][0]["conformal_weight"] == "0/1"
    assert doc["weights"][1]["label"] == [1, 0, 0]
    assert doc["weights"][1]["fourality"] == 1
