import json

import pytest
from conftest import FIXTURES
from hypothesis import given, settings
from strategies import poset_and_presheaf

from quantopos.errors import NonCommutingGenerators, NonHermitian, ParseError, ShapeMismatch
from quantopos.scenario import (
    load_presheaf,
    load_scenario,
    matrix_to_json,
    parse_scenario,
    presheaf_from_json,
    presheaf_to_json,
)

Z = [[[1.5707963267948966, 0], [0, 0]], [[0, 0], [-1.5707963267948966, 0]]]


def scenario(**over):
    base = {"dim": 2, "observables": [{"label": "z", "matrix": Z}]}
    base.update(over)
    return base


def test_load_f2():
    sc = load_scenario(FIXTURES / "f2.json")
    assert len(sc.observables) == 1 and [n for n, _ in sc.extra_contexts] == ["A_x"]
    assert sc.k_values == [0.5, -1.0, 2.0] and sc.seed == 0 and sc.tolerance == 1e-9
    assert len(sc.digest) == 64


def test_empty_observables():
    with pytest.raises(ParseError, match="observables must be nonempty"):
        parse_scenario(scenario(observables=[]))


def test_non_hermitian_named():
    bad = [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]
    with pytest.raises(NonHermitian, match="'w'"):
        parse_scenario(scenario(observables=[{"label": "w", "matrix": bad}]))


def test_non_commuting_generators_named():
    sx = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
    sz = [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]
    with pytest.raises(NonCommutingGenerators, match="B"):
        parse_scenario(scenario(extra_contexts=[{"name": "B", "generators": [sx, sz]}]))


@pytest.mark.parametrize("change, field", [
    ({"dim": 3}, r"observables\[0\]\.matrix"),
    ({"k_values": [0]}, "k_values"),
    ({"tolerance": -1}, "tolerance"),
    ({"seed": "x"}, "seed"),
    ({"bogus": 1}, "unknown keys"),
    ({"observables": [{"label": "z", "matrix": [[[1, 0], "a"], [[0, 0], [1, 0]]]}]}, r"observables\[0\].matrix\[0\]\[1\]"),
])
def test_parse_errors_name_the_field(change, field):
    with pytest.raises(ParseError, match=field):
        parse_scenario(scenario(**change))


def test_real_entries_accepted():
    sc = parse_scenario(scenario(observables=[{"label": "z", "matrix": [[1, 0], [0, -1]]}]))
    assert sc.observables["z"][1, 1] == -1


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_scenario(tmp_path / "nope.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ParseError, match="invalid JSON"):
        load_scenario(tmp_path / "bad.json")


def test_matrix_round_trip():
    import numpy as np

    m = np.array([[1 + 2j, 3], [0, -1j]])
    assert matrix_to_json(m) == [[[1.0, 2.0], [3.0, 0.0]], [[0.0, 0.0], [0.0, -1.0]]]


def test_q2_file(cp2, Q2):
    assert load_presheaf(FIXTURES / "q2.json", cp2.poset) == Q2


def test_presheaf_wrong_poset(cp2):
    with pytest.raises(ShapeMismatch):
        load_presheaf(FIXTURES / "q2.json", cp2.classical_poset)


def test_presheaf_parse_errors(cp2):
    with pytest.raises(ParseError, match="fibers"):
        presheaf_from_json({"fibers": {"nowhere": []}}, cp2.poset)
    bad = {"fibers": {"CI": ["p"], "A_x": ["q"]},
           "restrictions": [{"from": "A_x", "to": "CI", "map": {"q": "r"}}]}
    with pytest.raises(ParseError):
        presheaf_from_json(bad, cp2.poset)


@settings(max_examples=60, deadline=None)
@given(poset_and_presheaf(5, 3))
def test_presheaf_round_trip(pq):
    _, q = pq
    data = json.loads(json.dumps(presheaf_to_json(q)))
    assert presheaf_from_json(data) == q
