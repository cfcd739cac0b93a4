import random

import pytest
from hypothesis import settings

from parahoric.weights import Weight

settings.register_profile("repo", max_examples=40, deadline=None)
settings.load_profile("repo")

P = 3

# pure dominant weights, d = 1, n in {1, 2}
WEIGHT_FIXTURES = [(0, 0), (2, 0), (4, 0), (3, -1), (0, 0, 0, 0), (1, 0, 0, -1), (1, 1, 0, 0), (2, 1, -1, -2)]


def weight(lam, p=P):
    return Weight.simple(lam, p)


def seeded_distribution(module, seed, bound=50):
    rng = random.Random(seed)
    return module.from_moments({key: rng.randrange(-bound, bound) for key in module.index})


@pytest.fixture(scope="session")
def level11():
    """Newform of level 11, its ordinary 3-stabilisation and the M = 10 lift."""
    from parahoric.modsym import hecke_classical, lift_noncritical, p_stabilise
    dec = hecke_classical(11)
    sym = dec.rational[0]
    st = p_stabilise(sym, P, prec=15)
    defects = []
    Phi = lift_noncritical(st, 10, report=defects)
    return {"sym": sym, "stab": st, "Phi": Phi, "defects": defects, "M": 10}


@pytest.fixture(scope="session")
def family11():
    """The level-33 family through the ordinary lift, T-degree 3, M = 8."""
    from parahoric.family import TruncatedAffinoid, family_eigensymbol
    from parahoric.modsym import hecke_classical, lift_noncritical, p_stabilise
    M = 8
    sym = hecke_classical(11).rational[0]
    st = p_stabilise(sym, P, prec=M + 5)
    Phi0 = lift_noncritical(st, M)
    ring = TruncatedAffinoid(Weight.simple((0, 0), P), D=3, prec=M)
    fam = family_eigensymbol(st.N, ring, M, Phi0, st.alpha % P**M)
    return {"fam": fam, "ring": ring, "stab": st, "Phi0": Phi0, "M": M}
