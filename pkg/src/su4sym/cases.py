"""Case registry tying each exceptional level to its pipeline stages.

The three cases are fixed once and for all by their conformal
embeddings, so every stage result is memoized process-wide: the test
suite, the command line driver and interactive use then share a
single build per case no matter how many entry points touch it.
"""

from functools import lru_cache

from .embedding import exceptional_invariants
from .fusion import su4_fusion
from .liealg import su4_alcove
from .modular import su4_modular
from . import splitting

CASE_TABLE = {
    "e4": {"target": "spin15", "level": 4},
    "e6": {"target": "su10", "level": 6},
    "e8": {"target": "spin20", "level": 8},
}


class CaseSpec:
    """One of the three exceptional cases, with its target and level.

    Only the name is required; the ambient target algebra and the
    level are filled in from the registry, and giving either
    explicitly just asserts the pairing (anything else is rejected,
    there are no other cases).
    """

    def __init__(self, name, target=None, level=None, workdir=None):
        if name not in CASE_TABLE:
            raise ValueError("unknown case %r, pick one of %s"
                             % (name, sorted(CASE_TABLE)))
        row = CASE_TABLE[name]
        if target is not None and target != row["target"]:
            raise ValueError("case %s embeds in %s, not %r"
                             % (name, row["target"], target))
        if level is not None and level != row["level"]:
            raise ValueError("case %s lives at level %d, not %r"
                             % (name, row["level"], level))
        self.name = name
        self.target = row["target"]
        self.level = row["level"]
        self.workdir = workdir

    def __repr__(self):
        return "CaseSpec(%r, target=%r, level=%d)" % (
            self.name, self.target, self.level)


def case_names():
    return sorted(CASE_TABLE)


@lru_cache(maxsize=None)
def alcove_for(name):
    return su4_alcove(CaseSpec(name).level)


@lru_cache(maxsize=None)
def modular_for(name):
    return su4_modular(CaseSpec(name).level)


@lru_cache(maxsize=None)
def fusion_for(name):
    return su4_fusion(CaseSpec(name).level)


@lru_cache(maxsize=None)
def invariant_for(name):
    """The embedding case and its exceptional modular invariant."""
    case, invariant, _ = exceptional_invariants(name)
    return case, invariant


_VIEWS = {}


def ktensor_for(name, cache_dir=None):
    """The K tensor view, built once per process.

    The first call decides the disk cache location; later calls reuse
    the same view regardless of the argument.
    """
    if name not in _VIEWS:
        CaseSpec(name)
        _VIEWS[name] = splitting.KTensorView(name, cache_dir=cache_dir)
    return _VIEWS[name]


@lru_cache(maxsize=None)
def family_for(name):
    """The extracted and fully verified toric family."""
    view = ktensor_for(name)
    family = splitting.extract_toric(view)
    ok, report = splitting.verify_modular_splitting(view, family)
    assert ok, report
    return family
