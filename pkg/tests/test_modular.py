"""Modular generator matrices: exact values and defining relations."""

import json
from fractions import Fraction
from importlib import resources

import pytest

from su4sym.cyclo import CycloNumber, sqrt_int, zeta
from su4sym.fusion import SparseNatMatrix, su4_fusion
from su4sym.liealg import AffineAlgebraData, Alcove, su4_alcove
from su4sym.modular import (
    build_smatrix,
    build_tmatrix,
    commutes_with_modular,
    smatrix_weyl_sum,
    su4_modular,
    verlinde_matches_fusion,
)


def load_reference():
    with resources.files("su4sym.data").joinpath("reference.json").open() as fh:
        return json.load(fh)


REF = load_reference()


def root_form(spec):
    return CycloNumber.rational(spec["scale"]) * (
        CycloNumber.rational(spec["a"]) + CycloNumber.rational(spec["b"]) * sqrt_int(spec["root"]))


def test_su2_smoke():
    # build_smatrix proves the defining relations on the way out
    rep = build_smatrix(Alcove(AffineAlgebraData("A", 1), 2))
    half = CycloNumber.rational(Fraction(1, 2))
    assert rep.smat[0][0] == half
    assert rep.smat[0][2] == half
    assert rep.smat[1][1].is_zero()
    assert rep.smat[0][1] * rep.smat[0][1] == half
    assert rep.smat[1][2] * rep.smat[1][2] == half


def test_non_special_unitary_rejected():
    with pytest.raises(AssertionError):
        build_smatrix(Alcove(AffineAlgebraData("B", 7), 1))


@pytest.mark.parametrize("name,level", [("e4", 4), ("e6", 6), ("e8", 8)])
def test_vacuum_entry_counts_the_alcove_mass(name, level):
    rep = su4_modular(level)
    mass = (rep.smat[0][0] * rep.smat[0][0]).inverse()
    assert mass == root_form(REF["cases"][name]["cardinality_A"])


def test_first_row_gives_quantum_dimensions():
    rep = su4_modular(4)
    alc = su4_alcove(4)
    s00 = rep.smat[0][0]
    for n in range(len(alc)):
        assert rep.smat[0][n] / s00 == alc.quantum_dim(alc.weights[n])


@pytest.mark.parametrize("level", [6, 8])
def test_quantum_dimension_row_spot(level):
    rep = su4_modular(level)
    alc = su4_alcove(level)
    s00 = rep.smat[0][0]
    for n in range(0, len(alc), 13):
        assert rep.smat[0][n] / s00 == alc.quantum_dim(alc.weights[n])


def test_determinant_form_equals_weyl_sum():
    rep = su4_modular(4)
    wey = smatrix_weyl_sum(su4_alcove(4))
    for m in range(35):
        for n in range(35):
            assert wey[m][n] == rep.smat[m][n]


def test_tmatrix_phases():
    rep = su4_modular(4)
    alc = su4_alcove(4)
    # the vacuum phase carries only the central-charge shift
    assert rep.tphases[0] == zeta(16, 11)
    i100 = alc.index((1, 0, 0))
    assert alc.conformal_weight((1, 0, 0)) == Fraction(15, 64)
    assert rep.tphases[i100] / rep.tphases[0] == zeta(64, 15)
    assert build_tmatrix(alc)[0] == rep.tphases[0]


def test_commutant_membership():
    rep = su4_modular(4)
    assert commutes_with_modular(SparseNatMatrix.identity(35), rep)
    assert commutes_with_modular(rep.charge, rep)
    assert not commutes_with_modular(su4_fusion(4).matrix((1, 0, 0)), rep)


def test_commutant_dimension_guard():
    rep = su4_modular(4)
    with pytest.raises(AssertionError):
        commutes_with_modular(SparseNatMatrix.identity(3), rep)


def test_verlinde_full_k4():
    assert verlinde_matches_fusion(su4_modular(4), su4_fusion(4))


@pytest.mark.parametrize("level", [6, 8])
def test_verlinde_spot(level):
    rep = su4_modular(level)
    rows = list(range(0, len(rep), 17)) + [len(rep) - 1]
    assert verlinde_matches_fusion(rep, su4_fusion(level), rows=rows)
