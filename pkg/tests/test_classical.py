import numpy as np
import pytest
from conftest import HALF_PI, f1_obs, f3_obs, f4_obs

from quantopos.classical import (
    ObservableSet,
    PrequantizationCategory,
    context_name,
    enumerate_commutative_subsets,
    faithfulness_report,
    full_category,
    lie_commutes,
    spectral_collisions,
)
from quantopos.errors import InputError, NonHermitian, UnknownLabel


def test_commutation_cases():
    assert lie_commutes(f4_obs(), "z", "zp")
    assert not lie_commutes(f3_obs(), "x", "z")


def test_commutative_subsets():
    as_sets = lambda obs: [set(c) for c in enumerate_commutative_subsets(obs)]
    assert as_sets(f1_obs()) == [set(), {"z"}]
    assert as_sets(f3_obs()) == [set(), {"x"}, {"z"}]
    assert as_sets(f4_obs()) == [set(), {"z"}, {"zp"}, {"z", "zp"}]


def test_faithfulness_f1():
    rep = faithfulness_report(f1_obs(), 1.0)
    assert rep.faithful and rep.collision_free


def test_collision_at_k2():
    rep = faithfulness_report(f1_obs(), 2.0)
    assert list(rep.collisions) == ["z"]
    assert spectral_collisions(np.diag([HALF_PI, -HALF_PI]), 2.0) == [(-HALF_PI, HALF_PI)]


def test_non_hermitian_named():
    with pytest.raises(NonHermitian, match="bad"):
        ObservableSet.from_pairs([("bad", np.array([[0, 1], [0, 0]]))])


def test_empty_and_duplicates():
    with pytest.raises(InputError):
        ObservableSet.from_pairs([])
    with pytest.raises(InputError):
        ObservableSet.from_pairs([("a", np.eye(2)), ("a", np.eye(2))])


def test_unknown_label():
    with pytest.raises(UnknownLabel):
        f1_obs()["nope"]


def test_identical_observables_unfaithful():
    obs = ObservableSet.from_pairs([("a", np.eye(2)), ("b", np.eye(2))])
    assert faithfulness_report(obs).upsilon_violations == [("a", "b")]


def test_category_membership():
    cat = full_category(f4_obs())
    assert len(cat) == 4 and frozenset({"z"}) in cat
    sub = PrequantizationCategory.of(f4_obs(), [[], ["z", "zp"]])
    assert sub.issubcategory(cat) and not cat.issubcategory(sub)
    assert context_name(["zp", "z"]) == "{z,zp}"
