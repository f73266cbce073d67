"""Topos structure on presheaves over a finite poset.

Sieves are bitmasks over object indices; the fiber of the subobject
classifier at ``v`` lists every downset inside the principal downset of ``v``
ordered by (popcount, mask).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import _kernels
from .errors import MalformedDiagram, NotASubobject, ShapeMismatch
from .poset import FinitePoset
from .presheaf import (
    NatTransform,
    Presheaf,
    Subobject,
    hom_enumerate,
    q_down,
    terminal,
)
from .report import CheckReport


def sieves_at(poset: FinitePoset, v: int) -> list[int]:
    members = [w for w in poset.topo_order if poset.le(w, v)]
    below = [poset.down_masks[w] & ~(1 << w) for w in members]
    return sorted(_kernels.enumerate_downsets(members, below), key=lambda m: (bin(m).count("1"), m))


class Omega(Presheaf):
    """The sieve presheaf; element labels are the sieve masks themselves."""

    def top(self, v: int) -> int:
        return self.index_of(v, self.poset.down_masks[v])

    def sieve(self, v: int, i: int) -> int:
        return self.fibers[v][i]

    def mask_index(self, v: int, mask: int) -> int:
        return self.index_of(v, mask)

    @property
    def true(self) -> NatTransform:
        one = terminal(self.poset)
        return NatTransform(one, self, [[self.top(v)] for v in range(self.poset.size)])


@lru_cache(maxsize=64)
def omega(poset: FinitePoset) -> Omega:
    fibers = [sieves_at(poset, v) for v in range(poset.size)]
    pos = [{m: i for i, m in enumerate(f)} for f in fibers]
    res = {}
    for lo, hi in poset.pairs:
        cut = poset.down_masks[lo]
        res[(lo, hi)] = tuple(pos[lo][m & cut] for m in fibers[hi])
    return Omega(poset, fibers, res)


def characteristic_morphism(s: Subobject, q: Presheaf | None = None) -> NatTransform:
    """Send an element to the sieve of objects where its restriction lies in ``s``."""
    if q is not None and q != s.ambient:
        raise NotASubobject("subobject does not live in the given presheaf")
    s.require_valid()
    q = s.ambient
    ps = q.poset
    om = omega(ps)
    comps = []
    for v in range(ps.size):
        below = ps.down(v)
        row = []
        for i in range(len(q.fibers[v])):
            mask = 0
            for w in below:
                if q.res[(w, v)][i] in s.subsets[w]:
                    mask |= 1 << w
            row.append(om.mask_index(v, mask))
        comps.append(row)
    return NatTransform(q, om, comps)


def subobject_of_char(chi: NatTransform) -> Subobject:
    """Pull ``true`` back along ``chi``."""
    om = chi.target
    if not isinstance(om, Omega):
        raise ShapeMismatch("target of a characteristic map must be the sieve presheaf")
    return Subobject(chi.source, [{i for i, j in enumerate(c) if j == om.top(v)} for v, c in enumerate(chi.components)])


# limits --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cone:
    apex: Presheaf
    legs: tuple[NatTransform, ...]


def _same_poset(*ps: Presheaf) -> FinitePoset:
    posets = {p.poset for p in ps}
    if len(posets) != 1:
        raise MalformedDiagram("diagram mixes presheaves on different posets")
    return posets.pop()


def product(*factors: Presheaf) -> Cone:
    if not factors:
        raise MalformedDiagram("empty product; use the terminal presheaf")
    poset = _same_poset(*factors)
    fibers, idx = [], []
    for v in range(poset.size):
        tuples = list(itertools.product(*(range(len(f.fibers[v])) for f in factors)))
        idx.append(tuples)
        fibers.append([tuple(f.fibers[v][i] for f, i in zip(factors, t)) for t in tuples])
    pos = [{t: k for k, t in enumerate(ts)} for ts in idx]
    res = {}
    for lo, hi in poset.pairs:
        res[(lo, hi)] = tuple(pos[lo][tuple(f.res[(lo, hi)][i] for f, i in zip(factors, t))] for t in idx[hi])
    apex = Presheaf(poset, fibers, res)
    legs = tuple(
        NatTransform(apex, f, [[t[k] for t in idx[v]] for v in range(poset.size)]) for k, f in enumerate(factors)
    )
    return Cone(apex, legs)


def pullback(f: NatTransform, g: NatTransform) -> Cone:
    if f.target != g.target:
        raise MalformedDiagram("pullback legs must share a codomain")
    poset = _same_poset(f.source, g.source)
    a, b = f.source, g.source
    idx = [
        [(i, j) for i in range(len(a.fibers[v])) for j in range(len(b.fibers[v])) if f(v, i) == g(v, j)]
        for v in range(poset.size)
    ]
    pos = [{t: k for k, t in enumerate(ts)} for ts in idx]
    fibers = [[(a.fibers[v][i], b.fibers[v][j]) for i, j in idx[v]] for v in range(poset.size)]
    res = {
        (lo, hi): tuple(pos[lo][(a.res[(lo, hi)][i], b.res[(lo, hi)][j])] for i, j in idx[hi])
        for lo, hi in poset.pairs
    }
    apex = Presheaf(poset, fibers, res)
    return Cone(apex, (
        NatTransform(apex, a, [[i for i, _ in idx[v]] for v in range(poset.size)]),
        NatTransform(apex, b, [[j for _, j in idx[v]] for v in range(poset.size)]),
    ))


def equalizer(f: NatTransform, g: NatTransform) -> Cone:
    if f.source != g.source or f.target != g.target:
        raise MalformedDiagram("equalizer needs two parallel transformations")
    sub = Subobject(f.source, [{i for i in range(len(c)) if c[i] == d[i]} for c, d in zip(f.components, g.components)])
    incl = sub.inclusion()
    return Cone(incl.source, (incl,))


def finite_limit(kind: str, *args) -> Cone:
    """Dispatch on ``product``, ``pullback``, ``equalizer`` or ``terminal``."""
    if kind == "product":
        return product(*args)
    if kind == "pullback":
        if len(args) != 2:
            raise MalformedDiagram("a pullback takes two transformations")
        return pullback(*args)
    if kind == "equalizer":
        if len(args) != 2:
            raise MalformedDiagram("an equalizer takes two transformations")
        return equalizer(*args)
    if kind == "terminal":
        if len(args) != 1 or not isinstance(args[0], FinitePoset):
            raise MalformedDiagram("terminal takes the poset")
        return Cone(terminal(args[0]), ())
    raise MalformedDiagram(f"unknown limit shape {kind!r}")


def universal_property_report(kind: str, cone: Cone, args: Sequence, tests: Sequence[Presheaf]) -> CheckReport:
    """Check ``Hom(T, apex)`` bijects with cones from ``T`` for each test object."""
    rep = CheckReport(f"{kind} universal property")
    law = f"{kind} is universal"
    rep.law(law)
    for t in tests:
        mediating = hom_enumerate(t, cone.apex)
        induced = [tuple(leg.compose(h).components for leg in cone.legs) for h in mediating]
        if kind == "terminal":
            expected = 1
            ok = len(mediating) == expected
        else:
            if kind == "product":
                options = [hom_enumerate(t, leg.target) for leg in cone.legs]
                cones = {tuple(h.components for h in choice) for choice in itertools.product(*options)}
            elif kind == "pullback":
                f, g = args
                cones = {
                    (x.components, y.components)
                    for x in hom_enumerate(t, f.source)
                    for y in hom_enumerate(t, g.source)
                    if f.compose(x).components == g.compose(y).components
                }
            else:
                f, g = args
                cones = {(h.components,) for h in hom_enumerate(t, f.source) if f.compose(h) == g.compose(h)}
            ok = len(set(induced)) == len(induced) and set(induced) == cones
        rep.check(law, ok, test=repr(t))
    return rep


def product_map(f: NatTransform, g: NatTransform, source: Cone, target: Cone) -> NatTransform:
    """``f x g`` between two binary product cones."""
    a = source.apex
    comps = []
    for v in range(a.poset.size):
        row = []
        for i in range(len(a.fibers[v])):
            x, y = source.legs[0](v, i), source.legs[1](v, i)
            label = (f.target.fibers[v][f(v, x)], g.target.fibers[v][g(v, y)])
            row.append(target.apex.index_of(v, label))
        comps.append(row)
    return NatTransform(a, target.apex, comps)


# exponentials ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Exponential:
    """``R^Q`` with its evaluation map ``R^Q x Q -> R``.

    An element over ``v`` is a transformation from ``Q`` cut to the downset of
    ``v`` into ``R``; its label is the tuple of component tuples (empty outside
    the downset).
    """

    base: Presheaf
    exponent: Presheaf
    obj: Presheaf

    @property
    def evaluation_cone(self) -> Cone:
        return product(self.obj, self.exponent)

    def evaluation(self) -> NatTransform:
        cone = self.evaluation_cone
        a = cone.apex
        comps = []
        for v in range(a.poset.size):
            row = []
            for i in range(len(a.fibers[v])):
                alpha = self.obj.fibers[v][cone.legs[0](v, i)]
                q = cone.legs[1](v, i)
                row.append(alpha[v][q])
            comps.append(row)
        return NatTransform(a, self.base, comps)

    def curry(self, h: NatTransform, s: Presheaf) -> NatTransform:
        """Transpose ``h: S x Q -> R`` into ``S -> R^Q``.

        ``h`` must be defined on ``product(s, exponent).apex``, whose element
        ``(x, y)`` over ``w`` sits at index ``x * |Q(w)| + y``.
        """
        q = self.exponent
        ps = q.poset
        nq = [len(f) for f in q.fibers]
        comps = []
        for v in range(ps.size):
            below = [ps.le(w, v) for w in range(ps.size)]
            row = []
            for i in range(len(s.fibers[v])):
                label = tuple(
                    tuple(h.components[w][s.res[(w, v)][i] * nq[w] + y] for y in range(nq[w])) if below[w] else ()
                    for w in range(ps.size)
                )
                row.append(self.obj.index_of(v, label))
            comps.append(row)
        return NatTransform(s, self.obj, comps)


def exponential(q: Presheaf, r: Presheaf, limit: int | None = None) -> Exponential:
    poset = _same_poset(q, r)
    fibers = []
    for v in range(poset.size):
        part = q_down(q, v).to_presheaf()
        fib = []
        for t in hom_enumerate(part, r, limit):
            fib.append(tuple(t.components[w] if poset.le(w, v) else () for w in range(poset.size)))
        fibers.append(fib)
    pos = [{x: i for i, x in enumerate(f)} for f in fibers]
    res = {}
    for lo, hi in poset.pairs:
        res[(lo, hi)] = tuple(
            pos[lo][tuple(c if poset.le(w, lo) else () for w, c in enumerate(x))] for x in fibers[hi]
        )
    return Exponential(r, q, Presheaf(poset, fibers, res))


def exponential_bijection_report(s: Presheaf, exp: Exponential) -> CheckReport:
    """``Hom(S x Q, R) ~ Hom(S, R^Q)`` realized by currying, checked by enumeration."""
    rep = CheckReport("exponential adjunction")
    law = "currying is a bijection"
    cone = product(s, exp.exponent)
    left = hom_enumerate(cone.apex, exp.base)
    right = hom_enumerate(s, exp.obj)
    curried = [exp.curry(h, s) for h in left]
    rep.check(law, all(c.is_natural() for c in curried), "a transpose is not natural")
    rep.check(law, len(set(c.components for c in curried)) == len(left) == len(right),
              f"{len(left)} maps vs {len(right)} transposes")
    back = "evaluation recovers the map"
    rep.law(back)
    nq = [len(f) for f in exp.exponent.fibers]
    for h, c in zip(left, curried):
        ok = all(
            exp.obj.fibers[v][c.components[v][i]][v][y] == h.components[v][i * nq[v] + y]
            for v in range(s.poset.size) for i in range(len(s.fibers[v])) for y in range(nq[v])
        )
        if not rep.check(back, ok):
            break
    return rep
