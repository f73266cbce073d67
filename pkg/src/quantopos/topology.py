"""The topology induced by a coclosure table ``flat`` on a finite poset.

Three presentations are computed independently from the same table and
compared exactly: the closure operator on subobjects, the covering sieves
``J`` and the sieve endomorphism ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .bridge import ContextPoset, FlatPoset
from .classical import PrequantizationCategory, context_name
from .errors import InputError, NotASubobject
from .poset import FinitePoset
from .presheaf import NatTransform, Presheaf, Subobject, all_subobjects
from .report import CheckReport
from .topos import Omega, characteristic_morphism, omega, subobject_of_char


def _general_anchors(cp: ContextPoset, category: PrequantizationCategory | Iterable | None) -> list[int]:
    """Objects ``phi(C)`` for ``C`` in the chosen prequantization category."""
    if not isinstance(cp, ContextPoset):
        raise InputError("general mode needs a context poset built from observables")
    cat = cp.classical.objects if category is None else (
        category.objects if isinstance(category, PrequantizationCategory) else tuple(frozenset(c) for c in category)
    )
    for c in cat:
        if c not in cp.classical:
            raise InputError(f"{context_name(c)} is not a commutative subset")
    return sorted({cp.phi_index(c) for c in cat})


def closure(s: Subobject, fp: FlatPoset, mode: str = "flat", category=None) -> Subobject:
    """Closure of ``s`` in its ambient presheaf.

    ``flat`` mode keeps the elements whose restriction along ``flat`` lies in
    ``s``; ``general`` mode demands this at every ``phi(C) <= V`` for ``C`` in
    ``category`` (all commutative subsets by default).
    """
    s.require_valid()
    q = s.ambient
    ps = fp.poset
    if q.poset != ps:
        raise NotASubobject("subobject lives on a different poset")
    out = []
    if mode == "flat":
        for v in range(ps.size):
            b = fp.flat[v]
            row = q.res[(b, v)]
            out.append({i for i in range(len(q.fibers[v])) if row[i] in s.subsets[b]})
    elif mode == "general":
        anchors = _general_anchors(fp, category)
        for v in range(ps.size):
            below = [a for a in anchors if ps.le(a, v)]
            out.append({
                i for i in range(len(q.fibers[v])) if all(q.res[(a, v)][i] in s.subsets[a] for a in below)
            })
    else:
        raise InputError(f"unknown closure mode {mode!r}")
    return Subobject(q, out)


def true_subobject(om: Omega) -> Subobject:
    return Subobject(om, [{om.top(v)} for v in range(om.poset.size)])


@dataclass(frozen=True, eq=False)
class GrothendieckTopology:
    """Covering sieves per object, as a subobject of the sieve presheaf."""

    sub: Subobject

    @property
    def poset(self) -> FinitePoset:
        return self.sub.ambient.poset

    def covers(self, v: int) -> list[int]:
        om = self.sub.ambient
        return [om.fibers[v][i] for i in sorted(self.sub.subsets[v])]

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.sub.sizes

    def __eq__(self, other) -> bool:
        return isinstance(other, GrothendieckTopology) and self.sub == other.sub

    def __le__(self, other: "GrothendieckTopology") -> bool:
        return self.sub <= other.sub

    def table(self) -> dict[str, list[list[str]]]:
        ps = self.poset
        return {ps.names[v]: [ps.mask_names(m) for m in self.covers(v)] for v in range(ps.size)}


def grothendieck_J(fp: FlatPoset, mode: str = "flat", category=None) -> GrothendieckTopology:
    """Covering sieves: the closure of ``true`` inside the sieve presheaf.

    In ``flat`` mode this is ``{w : flat(V) in w}``; the formula is evaluated
    directly rather than through :func:`closure` so the two can be compared.
    """
    om = omega(fp.poset)
    if mode == "flat":
        subsets = [{i for i, m in enumerate(om.fibers[v]) if m >> fp.flat[v] & 1} for v in range(fp.poset.size)]
        return GrothendieckTopology(Subobject(om, subsets))
    return GrothendieckTopology(closure(true_subobject(om), fp, mode, category))


@dataclass(frozen=True, eq=False)
class LTTopology:
    """An endomorphism of the sieve presheaf."""

    morphism: NatTransform

    @property
    def omega(self) -> Omega:
        return self.morphism.source

    def apply(self, v: int, mask: int) -> int:
        om = self.omega
        return om.fibers[v][self.morphism.components[v][om.mask_index(v, mask)]]

    def __eq__(self, other) -> bool:
        return isinstance(other, LTTopology) and self.morphism.components == other.morphism.components

    def table(self) -> dict[str, dict[str, list[str]]]:
        om = self.omega
        ps = om.poset
        return {
            ps.names[v]: {",".join(ps.mask_names(m)) or "-": ps.mask_names(self.apply(v, m)) for m in om.fibers[v]}
            for v in range(ps.size)
        }

    def with_value(self, v, mask: int, value: int) -> "LTTopology":
        """A copy with one entry overwritten (used to build counterexamples)."""
        om = self.omega
        v = om.poset.index(v)
        comps = [list(c) for c in self.morphism.components]
        comps[v][om.mask_index(v, mask)] = om.mask_index(v, value)
        return LTTopology(NatTransform(om, om, comps))


def lt_j(fp: FlatPoset) -> LTTopology:
    ps = fp.poset
    om = omega(ps)
    comps = []
    for v in range(ps.size):
        below = ps.down(v)
        comps.append([om.mask_index(v, sum(1 << w for w in below if m >> fp.flat[w] & 1)) for m in om.fibers[v]])
    return LTTopology(NatTransform(om, om, comps))


def lt_from_grothendieck(jt: GrothendieckTopology) -> LTTopology:
    return LTTopology(characteristic_morphism(jt.sub))


def closure_from_lt(j: LTTopology, s: Subobject) -> Subobject:
    """Pull ``true`` back along ``j . chi_s``."""
    chi = characteristic_morphism(s)
    return subobject_of_char(j.morphism.compose(chi))


def grothendieck_from_closure(closure_fn, om: Omega) -> GrothendieckTopology:
    return GrothendieckTopology(closure_fn(true_subobject(om)))


def is_dense(s: Subobject, fp: FlatPoset) -> bool:
    return closure(s, fp) == Subobject.whole(s.ambient)


def sheafify(q: Presheaf, fp: FlatPoset) -> Presheaf:
    """Precompose with ``flat``."""
    from .geometric import inverse_image

    return inverse_image(fp.flat_map(), q)


def zeta(q: Presheaf, fp: FlatPoset) -> NatTransform:
    """``q -> sheafify(q)``, restriction along ``flat``."""
    target = sheafify(q, fp)
    return NatTransform(q, target, [q.res[(fp.flat[v], v)] for v in range(q.poset.size)])


def _sieve_str(ps: FinitePoset, mask: int) -> str:
    return "{" + ",".join(ps.mask_names(mask)) + "}"


def topology_axiom_report(
    fp: FlatPoset,
    j: LTTopology | None = None,
    jt: GrothendieckTopology | None = None,
    samples: Sequence[Presheaf] = (),
) -> CheckReport:
    """Every axiom of all three presentations, fiber by fiber, plus the round trip.

    ``samples`` supply subobjects for the closure laws (every subobject of each
    sample is used).
    """
    ps = fp.poset
    om = omega(ps)
    j = j or lt_j(fp)
    jt = jt or grothendieck_J(fp)
    rep = CheckReport("topology axioms")
    names = ps.names

    bad = j.morphism.naturality_violation()
    if bad is not None:
        rep.fail("j is natural", str(bad), object=bad.pair[-1], over=bad.pair[0])
    rep.law("j is natural")
    for v in range(ps.size):
        top = ps.down_masks[v]
        rep.check("j true = true", j.apply(v, top) == top, object=names[v])
        for m in om.fibers[v]:
            rep.check("j j = j", j.apply(v, j.apply(v, m)) == j.apply(v, m), object=names[v], sieve=_sieve_str(ps, m))
            rep.check("j is inflationary", m & ~j.apply(v, m) == 0, object=names[v], sieve=_sieve_str(ps, m))
            for m2 in om.fibers[v]:
                if m2 < m:
                    continue
                rep.check("j preserves meets", j.apply(v, m & m2) == j.apply(v, m) & j.apply(v, m2),
                          object=names[v], sieve=_sieve_str(ps, m), other=_sieve_str(ps, m2))

    bad = jt.sub.violation()
    if bad is not None:
        rep.fail("J is stable under restriction", str(bad), object=bad.pair[-1], over=bad.pair[0])
    rep.law("J is stable under restriction")
    for v in range(ps.size):
        covering = set(jt.covers(v))
        rep.check("J contains the maximal sieve", ps.down_masks[v] in covering, object=names[v])
        for rho in om.fibers[v]:
            if rho in covering:
                continue
            for omega_ in covering:
                members = ps.mask_members(omega_)
                if all((rho & ps.down_masks[w]) in set(jt.covers(w)) for w in members):
                    rep.fail("J is transitive", object=names[v], sieve=_sieve_str(ps, rho), cover=_sieve_str(ps, omega_))
                    break
        rep.check("J is the pullback of true along j",
                  covering == {m for m in om.fibers[v] if j.apply(v, m) == ps.down_masks[v]}, object=names[v])
    rep.law("J is transitive")

    rep.check("J is the closure of true", grothendieck_J(fp, "general") == jt if isinstance(fp, ContextPoset)
              else GrothendieckTopology(closure(true_subobject(om), fp)) == jt)

    for k, q in enumerate(samples):
        subs = all_subobjects(q)
        closed = {}
        for s in subs:
            c = closure(s, fp)
            closed[s] = c
            rep.check("S <= closure S", s <= c, sample=k, subobject=repr(s))
            rep.check("closure is idempotent", closure(c, fp) == c, sample=k, subobject=repr(s))
            rep.check("closure agrees with j", closure_from_lt(j, s) == c, sample=k, subobject=repr(s))
        for a in subs:
            for b in subs:
                rep.check("closure preserves meets", closed[a & b] == closed[a] & closed[b], sample=k,
                          subobject=repr(a), other=repr(b))
                if a <= b:
                    rep.check("closure is monotone", closed[a] <= closed[b], sample=k)

    rt_closure = lambda s: closure_from_lt(j, s)  # noqa: E731
    jt2 = grothendieck_from_closure(rt_closure, om)
    broken = jt2.sub.violation()
    if broken is not None:
        where = dict(zip(("object", "over"), broken.pair))
        rep.fail("round trip j -> closure -> J -> j", f"closure of true is not a subobject: {broken}", **where)
        rep.info = {"J_sizes": dict(zip(names, jt.sizes))}
        return rep
    j2 = lt_from_grothendieck(jt2)
    ok = j2 == j
    if not ok:
        for v in range(ps.size):
            for m in om.fibers[v]:
                if j2.apply(v, m) != j.apply(v, m):
                    rep.fail("round trip j -> closure -> J -> j", object=names[v], sieve=_sieve_str(ps, m),
                             detail=f"{_sieve_str(ps, j.apply(v, m))} becomes {_sieve_str(ps, j2.apply(v, m))}")
    else:
        rep.law("round trip j -> closure -> J -> j")
    rep.info = {"J_sizes": dict(zip(names, jt.sizes))}
    return rep


def coarsening_report(cp: ContextPoset, smaller, larger) -> CheckReport:
    """Larger prequantization categories give coarser (smaller) ``J``."""
    rep = CheckReport("coarsening")
    j1 = grothendieck_J(cp, "general", smaller)
    j2 = grothendieck_J(cp, "general", larger)
    small = {frozenset(c) for c in (smaller.objects if isinstance(smaller, PrequantizationCategory) else smaller)}
    big = {frozenset(c) for c in (larger.objects if isinstance(larger, PrequantizationCategory) else larger)}
    if not small <= big:
        raise InputError("categories are not nested")
    rep.check("J shrinks as the category grows", j2 <= j1)
    proper = set(cp.proper().objects)
    if proper <= small:
        rep.check("J is the same once A is included", j1 == j2)
        rep.check("J equals the flat topology", j1 == grothendieck_J(cp))
    rep.info = {"smaller": list(j1.sizes), "larger": list(j2.sizes)}
    return rep


def comonad_report(fp: FlatPoset, expected_fixpoints: Iterable[int] | None = None) -> CheckReport:
    """``flat`` as a comonad on the poset: comultiplication identity, counit the inclusion."""
    ps = fp.poset
    fl = fp.flat
    rep = CheckReport("comonad")
    for v in range(ps.size):
        n = ps.names[v]
        if not 0 <= fl[v] < ps.size:
            rep.fail("flat stays in the poset", object=n)
            continue
        rep.check("counit flat V <= V", ps.le(fl[v], v), f"flat({n}) = {ps.names[fl[v]]}", object=n)
        rep.check("flat flat = flat (comultiplication is the identity)", fl[fl[v]] == fl[v], object=n)
        rep.check("coassociativity", fl[fl[fl[v]]] == fl[fl[v]], object=n)
        rep.check("counit laws", fl[fl[v]] == fl[v] and ps.le(fl[fl[v]], fl[v]), object=n)
    for lo, hi in ps.pairs:
        if all(0 <= fl[x] < ps.size for x in (lo, hi)):
            rep.check("flat is monotone", ps.le(fl[lo], fl[hi]), object=f"{ps.names[lo]}<={ps.names[hi]}")
    fixed = [v for v in range(ps.size) if fl[v] == v]
    if expected_fixpoints is not None:
        rep.check("coalgebras are the flat fixpoints", sorted(expected_fixpoints) == fixed)
    rep.info = {"fixpoints": [ps.names[v] for v in fixed]}
    return rep
