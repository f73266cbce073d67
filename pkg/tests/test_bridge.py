import dataclasses
import time

import numpy as np
import pytest
from conftest import SIGMA_X, f1_obs, f3_obs, f4_obs
from hypothesis import given, settings
from hypothesis import strategies as st

from quantopos.bridge import (
    FlatPoset,
    build_context_poset,
    galois_report,
    k_invariance_report,
    phi,
    proper_category,
    psi,
    sharp,
)
from quantopos.classical import ObservableSet
from quantopos.errors import InputError, NonCommutativePreimage, ProperCategoryMissing
from quantopos.matrix import StarAlgebra, commutant, full_algebra, scalar_algebra
from quantopos.poset import FinitePoset


def sets(cat):
    return [set(c) for c in cat.objects]


def test_phi_values():
    obs = f1_obs()
    assert phi([], obs).span_equal(scalar_algebra(2))
    d2 = phi(["z"], obs)
    assert d2.span_equal(commutant([np.diag([1j, -1j])]))
    assert phi(["z"], obs, 2.0).span_equal(scalar_algebra(2))


def test_psi_values():
    obs = f1_obs()
    ax = StarAlgebra.from_span([np.eye(2), SIGMA_X], 2)
    assert psi(scalar_algebra(2), obs) == frozenset()
    assert psi(ax, obs) == frozenset()
    assert psi(phi(["z"], f4_obs()), f4_obs()) == {"z", "zp"}


def test_psi_of_noncommutative_algebra():
    with pytest.raises(NonCommutativePreimage):
        psi(full_algebra(2), f3_obs())


def test_sharp_and_proper():
    assert sharp(["z"], f4_obs()) == {"z", "zp"}
    assert sets(proper_category(f4_obs())) == [set(), {"z", "zp"}]
    assert sets(proper_category(f3_obs())) == [set(), {"x"}, {"z"}]


def test_f1_poset(F1):
    cp = F1[1]
    assert cp.names == ("CI", "phi{z}")
    assert cp.poset.cover_pairs == ((0, 1),)
    assert cp.flat == (0, 1)


def test_f2_poset(cp2):
    assert cp2.names == ("CI", "phi{z}", "A_x")
    assert cp2.poset.cover_pairs == ((0, 1), (0, 2))
    assert not cp2.poset.le(1, 2) and not cp2.poset.le(2, 1)
    assert cp2.flat == (0, 1, 0)
    assert cp2.fixpoints == (0, 1)


def test_f3_poset(F3):
    cp = F3[1]
    assert cp.poset.size == 3 and cp.flat == (0, 1, 2)


def test_extra_duplicate_of_phi_image_is_merged():
    cp = build_context_poset(f1_obs(), [("D", [np.diag([1.0, 2.0])])])
    assert cp.names == ("CI", "phi{z}")


@pytest.mark.parametrize("name", ["F1", "F2", "F3", "F4"])
def test_galois_passes(name, request):
    obs, cp = request.getfixturevalue(name)
    rep = galois_report(obs, cp)
    assert rep.passed, [str(w) for w in rep.witnesses]
    assert len(rep.laws) == 13


def test_tampered_flat_caught(F2):
    obs, cp = F2
    bad = dataclasses.replace(cp, flat=(0, 1, 2))
    rep = galois_report(obs, bad)
    assert not rep.passed
    assert any(w.law == "flat = phi . psi" and w.get("algebra") == "A_x" for w in rep.witnesses)


def test_k_invariance():
    obs = f1_obs()
    assert k_invariance_report(obs, [0.5, -1.0]).passed
    rep = k_invariance_report(obs, [2.0])
    assert rep.passed
    z = [e for e in rep.info["entries"] if e["context"] == "{z}"]
    assert z == [{"k": 2.0, "context": "{z}", "status": "degenerate-spectrum: unequal", "collisions": ["z"]}]
    with pytest.raises(InputError):
        k_invariance_report(obs, [0.0])


def test_degenerate_at_one_is_informational():
    # eigenvalues pi and -pi: at k=1 the exponential is -I, so phi({z}) is
    # already degenerate at 1 and the k=0.5 algebra is larger
    obs = ObservableSet.from_pairs([("z", np.diag([np.pi, -np.pi]))])
    rep = k_invariance_report(obs, [0.5])
    assert rep.passed
    assert any(e["status"] == "degenerate-spectrum: unequal" for e in rep.info["entries"])


def test_psi_map_into_proper_category(F4):
    _, cp = F4
    m = cp.psi_map(cp.proper())
    assert [cp.proper().objects[i] for i in m.mapping] == [frozenset(), frozenset({"z", "zp"})]


def test_psi_map_missing_category(F4):
    from quantopos.classical import PrequantizationCategory

    with pytest.raises(ProperCategoryMissing):
        F4[1].psi_map(PrequantizationCategory((frozenset(),)))


def test_flat_poset_invariants():
    p = FinitePoset.chain(3)
    assert FlatPoset(p, (0, 0, 2)).invariant_violations() == []
    assert FlatPoset(p, (0, 2, 2)).invariant_violations()


def test_k_zero_rejected():
    with pytest.raises(InputError):
        build_context_poset(f1_obs(), k=0)


@st.composite
def diagonal_observables(draw):
    n = draw(st.integers(2, 4))
    count = draw(st.integers(1, 3))
    values = st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0])
    return ObservableSet.from_pairs(
        [(f"a{i}", np.diag(draw(st.lists(values, min_size=n, max_size=n)))) for i in range(count)]
    )


@settings(max_examples=25, deadline=None)
@given(diagonal_observables())
def test_galois_laws_random_diagonal(obs):
    cp = build_context_poset(obs)
    rep = galois_report(obs, cp)
    assert rep.passed, [str(w) for w in rep.witnesses]
    assert not cp.check_invariants()


@pytest.mark.parametrize("name", ["F1", "F2", "F3", "F4"])
def test_galois_fast(name, request):
    obs, cp = request.getfixturevalue(name)
    t0 = time.perf_counter()
    galois_report(obs, cp)
    assert time.perf_counter() - t0 < 1.0
