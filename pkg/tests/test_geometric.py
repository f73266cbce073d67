import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_direct_image_sizes, brute_homs, brute_shriek_sizes
from strategies import flat_posets, posets, presheaves

from quantopos.errors import ShapeMismatch
from quantopos.geometric import (
    adjoint_transposes,
    adjunction_report,
    direct_image,
    factorization_report,
    inverse_image,
    shriek,
    shriek_transposes,
    unit_eta,
    unit_mu,
    unit_naturality_report,
    varpi,
    varpi_report,
)
from quantopos.poset import MonotoneMap
from quantopos.presheaf import NatTransform, empty_presheaf, hom_enumerate, one_down, terminal


def test_inverse_image_of_q2(cp2, Q2):
    pulled = inverse_image(cp2.phi_map(), Q2)
    assert pulled.fibers == (("p",), ("d",))


def test_direct_and_shriek_of_p2(cp2, P2):
    f = cp2.phi_map()
    assert direct_image(f, P2).sizes == (1, 2, 1)
    assert shriek(f, P2).sizes == (1, 2, 0)


def test_adjunction_counts(cp2, P2, Q2):
    f = cp2.phi_map()
    fp = direct_image(f, P2)
    left = hom_enumerate(inverse_image(f, Q2), P2)
    right = hom_enumerate(Q2, fp)
    assert len(left) == len(right) == 2
    up, down = adjoint_transposes(f, Q2, P2, fp)
    assert {up(s).components for s in left} == {t.components for t in right}
    assert all(down(up(s)) == s for s in left)
    assert all(up(down(t)) == t for t in right)


def test_shriek_transposes(cp2, P2, Q2):
    f = cp2.phi_map()
    sp = shriek(f, P2)
    lhs = hom_enumerate(sp, Q2)
    rhs = hom_enumerate(P2, inverse_image(f, Q2))
    assert len(lhs) == len(rhs)
    to_left, to_right = shriek_transposes(f, P2, Q2, sp)
    assert all(to_left(to_right(lam)) == lam for lam in lhs)
    assert all(to_right(to_left(nu)) == nu for nu in rhs)


def test_eta_at_ax(cp2, Q2):
    eta = unit_eta(cp2.phi_map(), Q2)
    assert eta.components[cp2.index("A_x")] == (0, 0)
    assert eta.is_natural() and not eta.is_injective()


def test_eta_of_direct_image_is_iso(cp2, P2):
    f = cp2.phi_map()
    fp = direct_image(f, P2)
    assert unit_eta(f, fp).is_iso()


def test_mu_natural(cp2, P2):
    assert unit_mu(cp2.phi_map(), P2).is_natural()


def test_wrong_poset(cp2, Q2):
    with pytest.raises(ShapeMismatch):
        direct_image(cp2.phi_map(), Q2)


def test_f2_reports(cp2, P2, Q2):
    ps, cs = cp2.poset, cp2.classical_poset
    sources = [P2, terminal(cs), empty_presheaf(cs), one_down(cs, 1)]
    targets = [Q2, terminal(ps), one_down(ps, 2), direct_image(cp2.phi_map(), P2)]
    for f in (cp2.phi_map(), *cp2.sharp_map()):
        src = sources if f.source == cs else [terminal(f.source), one_down(f.source, 0)]
        tgt = targets if f.target == ps else ([terminal(f.target), one_down(f.target, f.target.size - 1)]
                                              if f.target != cs else sources)
        rep = adjunction_report(f, src, tgt)
        assert rep.passed, [str(w) for w in rep.witnesses]
    swap = NatTransform(Q2, Q2, [[0], [0], [1, 0]])
    assert unit_naturality_report(cp2.phi_map(), [swap], [NatTransform.identity(P2)]).passed
    assert varpi_report(cp2.phi_map(), cp2.psi_map(), sources).passed
    onto, incl = cp2.sharp_map()
    assert factorization_report(cp2.phi_map(), cp2.phi_map().compose(incl), onto, sources, targets).passed


def test_varpi_components(cp2, P2):
    fwd, back = varpi(cp2.phi_map(), cp2.psi_map(), P2)
    assert fwd.is_iso() and back == fwd.inverse()


@st.composite
def maps_and_presheaves(draw):
    """An inclusion of a subposet, or a coclosure, with a presheaf on the source."""
    if draw(st.booleans()):
        fp = draw(flat_posets(4))
        f = fp.flat_map()
    else:
        p = draw(posets(4))
        keep = sorted(set(draw(st.lists(st.integers(0, p.size - 1), min_size=1, max_size=p.size))))
        f = MonotoneMap(p.subposet(keep), p, tuple(keep), "incl")
    return f, draw(presheaves(f.source, 2)), draw(presheaves(f.target, 2))


@settings(max_examples=40, deadline=None)
@given(maps_and_presheaves())
def test_images_match_oracles(case):
    f, p, _ = case
    assert list(direct_image(f, p).sizes) == brute_direct_image_sizes(f, p)
    assert list(shriek(f, p).sizes) == brute_shriek_sizes(f, p)


@settings(max_examples=40, deadline=None)
@given(maps_and_presheaves())
def test_adjunctions_hold(case):
    f, p, q = case
    assert len(brute_homs(inverse_image(f, q), p)) == len(brute_homs(q, direct_image(f, p)))
    assert len(brute_homs(shriek(f, p), q)) == len(brute_homs(p, inverse_image(f, q)))
    rep = adjunction_report(f, [p], [q])
    assert rep.passed, [str(w) for w in rep.witnesses]
