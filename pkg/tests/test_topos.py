import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_downsets, brute_homs
from strategies import poset_and_presheaf, posets, presheaves

from quantopos.errors import MalformedDiagram
from quantopos.presheaf import NatTransform, all_subobjects, hom_count, one_down, terminal
from quantopos.topos import (
    characteristic_morphism,
    equalizer,
    exponential,
    exponential_bijection_report,
    finite_limit,
    omega,
    product,
    pullback,
    sieves_at,
    subobject_of_char,
    universal_property_report,
)


def test_omega_sizes(cp2):
    assert omega(cp2.poset).sizes == (2, 3, 3)


@given(posets(6))
def test_sieves_are_downsets_below(p):
    for v in range(p.size):
        expect = [m for m in brute_downsets(p) if not m & ~p.down_masks[v]]
        assert sorted(sieves_at(p, v)) == sorted(expect)


def test_characteristic_map(Q2, S2):
    om = omega(Q2.poset)
    chi = characteristic_morphism(S2)
    a = Q2.poset.index("A_x")
    assert [om.fibers[a][chi(a, i)] for i in range(2)] == [0b001, 0b001]
    assert subobject_of_char(chi) == S2
    back = pullback(om.true, chi)
    assert back.apex.sizes == (1, 1, 0)


@settings(max_examples=40, deadline=None)
@given(poset_and_presheaf(4, 2))
def test_subobject_classifier(pq):
    p, q = pq
    subs = all_subobjects(q)
    assert len(subs) == hom_count(q, omega(p))
    for s in subs[:10]:
        assert subobject_of_char(characteristic_morphism(s)) == s


def test_equalizer_of_swap(Q2):
    swap = NatTransform(Q2, Q2, [[0], [0], [1, 0]])
    eq = equalizer(NatTransform.identity(Q2), swap)
    assert eq.apex.sizes == (1, 1, 0)


def test_products(Q2):
    one = terminal(Q2.poset)
    assert product(one, Q2).apex.sizes == (1, 1, 2)
    assert product(Q2, Q2).apex.sizes == (1, 1, 4)


def test_exponential_sizes(Q2):
    one = terminal(Q2.poset)
    assert exponential(one, Q2).obj.sizes == (1, 1, 2)
    assert exponential(Q2, one).obj.sizes == (1, 1, 1)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_exponential_fibers_by_yoneda(data):
    p = data.draw(posets(3))
    q = data.draw(presheaves(p, 2))
    r = data.draw(presheaves(p, 2))
    e = exponential(q, r)
    for v in range(p.size):
        assert len(e.obj.fibers[v]) == len(brute_homs(product(one_down(p, v), q).apex, r))
    rep = exponential_bijection_report(terminal(p), e)
    assert rep.passed


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_limit_universal_properties(data):
    p = data.draw(posets(3))
    a = data.draw(presheaves(p, 2))
    b = data.draw(presheaves(p, 2))
    tests = [terminal(p), data.draw(presheaves(p, 2))]
    cone = product(a, b)
    assert universal_property_report("product", cone, [a, b], tests).passed
    maps = [NatTransform(a, b, c) for c in sorted(brute_homs(a, b))]
    if maps:
        f, g = maps[0], maps[-1]
        assert universal_property_report("equalizer", equalizer(f, g), [f, g], tests).passed
        ident = NatTransform.identity(b)
        assert universal_property_report("pullback", pullback(f, ident), [f, ident], tests).passed


def test_finite_limit_dispatch(Q2):
    ident = NatTransform.identity(Q2)
    assert finite_limit("equalizer", ident, ident).apex.sizes == Q2.sizes
    with pytest.raises(MalformedDiagram):
        finite_limit("coequalizer", ident, ident)
    with pytest.raises(MalformedDiagram):
        finite_limit("pullback", ident, NatTransform.identity(terminal(Q2.poset)))
