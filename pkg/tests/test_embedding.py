"""Conformal embedding resolution: levels, candidates, invariants."""

import json
from fractions import Fraction
from importlib import resources

import pytest

from su4sym.cyclo import CycloNumber, sqrt_int
from su4sym.embedding import (
    EmbeddingCase,
    NonIntegerIndexError,
    NotConformalError,
    adjoint_weight,
    algebra_dim,
    assemble_invariant,
    block_qdimension,
    branching_candidates,
    conformal_check,
    conjugate_invariant,
    dynkin_index,
    embedding_case,
    exceptional_invariants,
)
from su4sym.liealg import AffineAlgebraData, Alcove, su4_alcove
from su4sym.modular import commutes_with_modular, su4_modular


def load_reference():
    with resources.files("su4sym.data").joinpath("reference.json").open() as fh:
        return json.load(fh)


REF = load_reference()
CASES = ("e4", "e6", "e8")


def root_form(spec):
    return CycloNumber.rational(spec["scale"]) * (
        CycloNumber.rational(spec["a"]) + CycloNumber.rational(spec["b"]) * sqrt_int(spec["root"]))


def parse_label(label):
    return tuple(int(ch) for ch in label)


def block_as_dict(block):
    return {parse_label(key): value for key, value in block.items()}


@pytest.mark.parametrize("name,level,ambient", [
    ("e4", 4, ("B", 7)),
    ("e6", 6, ("A", 9)),
    ("e8", 8, ("D", 10)),
])
def test_levels_from_dynkin_index(name, level, ambient):
    case = embedding_case(name)
    assert case.level == level == REF["cases"][name]["level"]
    assert (case.ambient.series, case.ambient.rank) == ambient
    total = algebra_dim(case.ambient)
    assert sum(case.kalgebra.classical_dim(nu) for nu in case.adjoint_branching) == total


def test_dynkin_index_rejects_wrong_branching():
    bad = EmbeddingCase("bad", AffineAlgebraData("B", 7),
                        ((1, 0, 1), (2, 1, 0), (1, 1, 0)))
    with pytest.raises(NonIntegerIndexError):
        dynkin_index(bad)


@pytest.mark.parametrize("name,charge", [
    ("e4", Fraction(15, 2)), ("e6", Fraction(9)), ("e8", Fraction(10)),
])
def test_central_charges(name, charge):
    assert embedding_case(name).central_charge == charge


def test_conformal_check_rejects_non_conformal_pair():
    # five copies of the 20-dimensional irrep have index 40, so the level is
    # 4, but an SU(10) ambient at level 1 has central charge 9, not 15/2
    fake = EmbeddingCase("fake", AffineAlgebraData("A", 9),
                         ((0, 2, 0),) * 5)
    assert dynkin_index(fake) == 4
    with pytest.raises(NotConformalError):
        conformal_check(fake)


def test_adjoint_weight_is_highest_root():
    assert adjoint_weight(AffineAlgebraData("A", 3)) == (1, 0, 1)
    assert adjoint_weight(AffineAlgebraData("B", 7)) == (0, 1, 0, 0, 0, 0, 0)


@pytest.mark.parametrize("name", CASES)
def test_candidates_match_reference(name):
    case = embedding_case(name)
    got = branching_candidates(case)
    want = REF["cases"][name]["candidates"]
    assert len(got) == len(want)
    for block, ref in zip(got, want):
        assert block == [tuple(m) for m in ref["members"]]


@pytest.mark.parametrize("name", CASES)
def test_candidate_depths_are_integers(name):
    case = embedding_case(name)
    alco = su4_alcove(case.level)
    ambient_alcove = Alcove(case.ambient, 1)
    for mu, block in zip(ambient_alcove.weights, branching_candidates(case)):
        h_mu = ambient_alcove.conformal_weight(mu)
        for lam in block:
            assert (alco.conformal_weight(lam) - h_mu).denominator == 1


@pytest.mark.parametrize("name,count", [("e4", 1), ("e6", 2), ("e8", 1)])
def test_solution_counts(name, count):
    _, _, solutions = exceptional_invariants(name)
    assert len(solutions) == count
    assert sum(1 for s in solutions if s.is_type_one) == 1


def test_second_su10_solution_is_the_conjugated_invariant():
    case, invariant, solutions = exceptional_invariants("e6")
    other = [s for s in solutions if not s.is_type_one]
    assert len(other) == 1
    twisted = conjugate_invariant(invariant)
    assert other[0].invariant_matrix == twisted.matrix
    assert other[0].invariant_matrix.trace() == 16
    assert other[0].branching is None


@pytest.mark.parametrize("name", CASES)
def test_invariant_table_numbers(name):
    table = REF["cases"][name]["table"]
    _, invariant, _ = exceptional_invariants(name)
    assert invariant.trace() == table["r_E"]
    assert invariant.norm() == table["r_O"]
    assert invariant.cell_count() == table["r_W"]
    assert len(invariant.exponents) == REF["cases"][name]["exponent_count"]


@pytest.mark.parametrize("name", CASES)
def test_invariant_commutes_with_modular_generators(name):
    case, invariant, solutions = exceptional_invariants(name)
    rep = su4_modular(case.level)
    for sol in solutions:
        assert commutes_with_modular(sol.invariant_matrix, rep)


@pytest.mark.parametrize("name", CASES)
def test_branching_blocks_match_reference(name):
    case, invariant, _ = exceptional_invariants(name)
    ref_blocks = [block_as_dict(b) for b in REF["cases"][name]["branching"]]
    got = invariant.blocks
    assert len(got) == len(ref_blocks)
    # the vacuum block is unambiguous, conjugate pairs only as a multiset:
    # swapping the two members of a pair leaves every modular datum fixed
    assert got[0] == ref_blocks[0]
    key = lambda blocks: sorted(sorted(b.items()) for b in blocks)
    assert key(got) == key(ref_blocks)
    ambient_alcove = Alcove(case.ambient, 1)
    for s, block in enumerate(got):
        sbar = ambient_alcove.conjugate_index(s)
        if sbar == s:
            assert block == ref_blocks[s]


@pytest.mark.parametrize("name", CASES)
def test_rejected_candidates(name):
    case, invariant, _ = exceptional_invariants(name)
    members = branching_candidates(case)
    got = [sorted(set(block) - set(kept))
           for block, kept in zip(members, invariant.blocks)]
    want = [sorted(parse_label(lab) for lab in ref["rejected"])
            for ref in REF["cases"][name]["candidates"]]
    assert sorted(map(tuple, got)) == sorted(map(tuple, want))
    ambient_alcove = Alcove(case.ambient, 1)
    for s in range(len(members)):
        if ambient_alcove.conjugate_index(s) == s:
            assert got[s] == want[s]


def test_e8_vacuum_line_drops_four_entries():
    _, invariant, _ = exceptional_invariants("e8")
    kept = set(invariant.blocks[0])
    for lam in ((4, 0, 0), (0, 0, 4), (4, 4, 0), (0, 4, 4)):
        assert lam not in kept


@pytest.mark.parametrize("name,changes", [
    ("e4", False), ("e6", True), ("e8", False),
])
def test_conjugation_twist(name, changes):
    _, invariant, _ = exceptional_invariants(name)
    twisted = conjugate_invariant(invariant)
    assert twisted.equals_original == (not changes)
    assert changes == REF["cases"][name]["conjugation_changes_invariant"]
    assert twisted.matrix.trace() == (invariant.trace() if not changes else 16)


@pytest.mark.parametrize("name", CASES)
def test_block_quantum_dimensions(name):
    case, invariant, _ = exceptional_invariants(name)
    alco = su4_alcove(case.level)
    want = [root_form(spec) for spec in REF["cases"][name]["block_qdims"]]
    got = [block_qdimension(block, alco) for block in invariant.blocks]
    assert got == want
    gamma0 = root_form(REF["cases"][name]["gamma0_qdim"])
    assert got[0] == gamma0


@pytest.mark.parametrize("name", CASES)
def test_cardinalities(name):
    case, invariant, _ = exceptional_invariants(name)
    alco = su4_alcove(case.level)
    mass = alco.quantum_mass()
    assert mass == root_form(REF["cases"][name]["cardinality_A"])
    gamma0 = block_qdimension(invariant.blocks[0], alco)
    card = mass / gamma0
    assert card == root_form(REF["cases"][name]["cardinality_E"])


@pytest.mark.parametrize("name", CASES)
def test_exponents_are_the_diagonal_support(name):
    _, invariant, _ = exceptional_invariants(name)
    alco = invariant.alcove
    diag = {m for (m, n) in invariant.matrix.entries if m == n}
    assert set(invariant.exponents) == diag
    # every exponent appears in some block of the partition function
    covered = {alco.index(w) for block in invariant.blocks for w in block}
    assert diag == covered


def test_block_listing_renders_squares():
    _, invariant, _ = exceptional_invariants("e4")
    listing = invariant.block_listing()
    assert listing.splitlines() == [
        "|000 + 210 + 012 + 040|^2",
        "|101 + 400 + 121 + 004|^2",
        "|2 111|^2",
    ]
    twisted = conjugate_invariant(invariant)
    assert "conj[" in twisted.block_listing()


@pytest.mark.parametrize("name", CASES)
def test_assembled_matrix_is_symmetric_with_unit_vacuum(name):
    _, invariant, _ = exceptional_invariants(name)
    mat = invariant.matrix
    assert mat[0, 0] == 1
    for (m, n), v in mat.entries.items():
        assert mat[n, m] == v
