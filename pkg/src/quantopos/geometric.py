"""Inverse image, direct image and the left adjoint along a monotone map.

For ``f: C -> V`` (``C`` the source poset) presheaves on ``V`` pull back to
``C`` and presheaves on ``C`` push forward in two ways.  Elements of the
direct image over ``v`` are compatible families indexed by ``{c : f(c) <= v}``;
their labels are tuples over the source objects with ``None`` outside that
set.  Elements of the left adjoint over ``v`` are classes of pairs
``(p, c)`` with ``v <= f(c)``, labelled by a canonical representative.
"""

from __future__ import annotations

from typing import Sequence

from .errors import ShapeMismatch
from .poset import MonotoneMap
from .presheaf import NatTransform, Presheaf, hom_enumerate, one_down
from .report import CheckReport


def _on_target(f: MonotoneMap, q: Presheaf) -> None:
    if q.poset != f.target:
        raise ShapeMismatch(f"presheaf does not live on the target of {f.name}")


def _on_source(f: MonotoneMap, p: Presheaf) -> None:
    if p.poset != f.source:
        raise ShapeMismatch(f"presheaf does not live on the source of {f.name}")


def inverse_image(f: MonotoneMap, q: Presheaf) -> Presheaf:
    _on_target(f, q)
    m = f.mapping
    return Presheaf(f.source, [q.fibers[m[c]] for c in range(f.source.size)],
                    {(lo, hi): q.res[(m[lo], m[hi])] for lo, hi in f.source.pairs})


def inverse_image_map(f: MonotoneMap, alpha: NatTransform) -> NatTransform:
    return NatTransform(inverse_image(f, alpha.source), inverse_image(f, alpha.target),
                        [alpha.components[f(c)] for c in range(f.source.size)])


def pulled_point(f: MonotoneMap, v: int) -> Presheaf:
    """The point presheaf on ``{c : f(c) <= v}``."""
    return inverse_image(f, one_down(f.target, v))


def direct_image(f: MonotoneMap, p: Presheaf, limit: int | None = None) -> Presheaf:
    _on_source(f, p)
    src, tgt = f.source, f.target
    fibers = []
    for v in range(tgt.size):
        fam = []
        for t in hom_enumerate(pulled_point(f, v), p, limit):
            fam.append(tuple(t.components[c][0] if t.components[c] else None for c in range(src.size)))
        fibers.append(fam)
    pos = [{x: i for i, x in enumerate(fb)} for fb in fibers]
    res = {}
    for lo, hi in tgt.pairs:
        keep = [tgt.le(f(c), lo) for c in range(src.size)]
        res[(lo, hi)] = tuple(pos[lo][tuple(x if k else None for x, k in zip(fam, keep))] for fam in fibers[hi])
    return Presheaf(tgt, fibers, res)


def direct_image_map(f: MonotoneMap, beta: NatTransform, source: Presheaf | None = None,
                     target: Presheaf | None = None) -> NatTransform:
    a = source or direct_image(f, beta.source)
    b = target or direct_image(f, beta.target)
    comps = []
    for v, fib in enumerate(a.fibers):
        comps.append([
            b.index_of(v, tuple(None if x is None else beta.components[c][x] for c, x in enumerate(fam)))
            for fam in fib
        ])
    return NatTransform(a, b, comps)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _shriek_classes(f: MonotoneMap, p: Presheaf, v: int):
    src = f.source
    pairs = [(c, i) for c in src.topo_order if f.target.le(v, f(c)) for i in range(len(p.fibers[c]))]
    at = {pr: k for k, pr in enumerate(pairs)}
    uf = _UnionFind(len(pairs))
    for c, i in pairs:
        for lo in src.down(c):
            if lo != c and f.target.le(v, f(lo)):
                uf.union(at[(c, i)], at[(lo, p.res[(lo, c)][i])])
    roots = sorted({uf.find(k) for k in range(len(pairs))})
    cls_of = {pr: roots.index(uf.find(k)) for pr, k in at.items()}
    reps = [pairs[r] for r in roots]
    return reps, cls_of


def shriek(f: MonotoneMap, p: Presheaf) -> Presheaf:
    _on_source(f, p)
    tgt = f.target
    data = [_shriek_classes(f, p, v) for v in range(tgt.size)]
    fibers = [[(f.source.names[c], p.fibers[c][i]) for c, i in reps] for reps, _ in data]
    res = {(lo, hi): tuple(data[lo][1][pr] for pr in data[hi][0]) for lo, hi in tgt.pairs}
    return Presheaf(tgt, fibers, res)


def shriek_class(f: MonotoneMap, p: Presheaf, v: int, c: int, i: int) -> int:
    """Index of the class of ``(p_i, c)`` in the fiber of the left adjoint over ``v``."""
    return _shriek_classes(f, p, v)[1][(c, i)]


def shriek_map(f: MonotoneMap, beta: NatTransform, source: Presheaf | None = None,
               target: Presheaf | None = None) -> NatTransform:
    a = source or shriek(f, beta.source)
    b = target or shriek(f, beta.target)
    comps = []
    for v in range(f.target.size):
        reps, _ = _shriek_classes(f, beta.source, v)
        _, cls_b = _shriek_classes(f, beta.target, v)
        comps.append([cls_b[(c, beta.components[c][i])] for c, i in reps])
    return NatTransform(a, b, comps)


def unit_eta(f: MonotoneMap, q: Presheaf, image: Presheaf | None = None) -> NatTransform:
    """``q -> f_* f^* q``: an element goes to its family of restrictions."""
    pulled = inverse_image(f, q)
    image = image or direct_image(f, pulled)
    src, tgt = f.source, f.target
    comps = []
    for v in range(tgt.size):
        row = []
        for i in range(len(q.fibers[v])):
            fam = tuple(q.res[(f(c), v)][i] if tgt.le(f(c), v) else None for c in range(src.size))
            row.append(image.index_of(v, fam))
        comps.append(row)
    return NatTransform(q, image, comps)


def unit_mu(f: MonotoneMap, p: Presheaf, image: Presheaf | None = None) -> NatTransform:
    """``p -> f^* f_! p``: an element over ``c`` goes to its class over ``f(c)``."""
    target = inverse_image(f, image or shriek(f, p))
    comps = [[shriek_class(f, p, f(c), c, i) for i in range(len(p.fibers[c]))] for c in range(f.source.size)]
    return NatTransform(p, target, comps)


# transposes ------------------------------------------------------------------

def adjoint_transposes(f: MonotoneMap, q: Presheaf, p: Presheaf, fp: Presheaf | None = None):
    """Both directions of ``Hom(f^* Q, P) ~ Hom(Q, f_* P)``."""
    fp = fp or direct_image(f, p)
    pq = inverse_image(f, q)
    src, tgt = f.source, f.target

    def up(sigma: NatTransform) -> NatTransform:
        comps = []
        for v in range(tgt.size):
            row = []
            for i in range(len(q.fibers[v])):
                fam = tuple(
                    sigma.components[c][q.res[(f(c), v)][i]] if tgt.le(f(c), v) else None for c in range(src.size)
                )
                row.append(fp.index_of(v, fam))
            comps.append(row)
        return NatTransform(q, fp, comps)

    def down(tau: NatTransform) -> NatTransform:
        return NatTransform(pq, p, [
            [fp.fibers[f(c)][tau.components[f(c)][i]][c] for i in range(len(q.fibers[f(c)]))]
            for c in range(src.size)
        ])

    return up, down


def shriek_transposes(f: MonotoneMap, p: Presheaf, q: Presheaf, sp: Presheaf | None = None):
    """Both directions of ``Hom(f_! P, Q) ~ Hom(P, f^* Q)``."""
    sp = sp or shriek(f, p)
    pq = inverse_image(f, q)
    src, tgt = f.source, f.target
    classes = [_shriek_classes(f, p, v) for v in range(tgt.size)]

    def to_right(lam: NatTransform) -> NatTransform:
        return NatTransform(p, pq, [
            [lam.components[f(c)][classes[f(c)][1][(c, i)]] for i in range(len(p.fibers[c]))]
            for c in range(src.size)
        ])

    def to_left(nu: NatTransform) -> NatTransform | None:
        comps = []
        for v in range(tgt.size):
            reps, cls_of = classes[v]
            row: list[int | None] = [None] * len(reps)
            for (c, i), k in cls_of.items():
                y = q.res[(v, f(c))][nu.components[c][i]]
                if row[k] is None:
                    row[k] = y
                elif row[k] != y:
                    return None
            comps.append(row)
        return NatTransform(sp, q, comps)

    return to_left, to_right


def adjunction_report(f: MonotoneMap, sources: Sequence[Presheaf], targets: Sequence[Presheaf],
                      limit: int | None = None) -> CheckReport:
    """Check both adjunctions along ``f`` with explicit transposes on all sample pairs.

    ``sources`` live on ``f.source``, ``targets`` on ``f.target``.
    """
    rep = CheckReport(f"adjunctions along {f.name}")
    counts = []
    images = {id(p): (direct_image(f, p, limit), shriek(f, p)) for p in sources}
    pulled = {id(q): inverse_image(f, q) for q in targets}
    for pi, p in enumerate(sources):
        fp, sp = images[id(p)]
        for qi, q in enumerate(targets):
            where = {"source": pi, "target": qi}
            pq = pulled[id(q)]
            left = hom_enumerate(pq, p, limit)
            right = hom_enumerate(q, fp, limit)
            up, down = adjoint_transposes(f, q, p, fp)
            ups = [up(s) for s in left]
            ok = (
                len(left) == len(right)
                and all(u.is_natural() for u in ups)
                and len({u.components for u in ups}) == len(ups)
                and all(down(u).components == s.components for u, s in zip(ups, left))
                and all(up(down(t)).components == t.components for t in right)
            )
            rep.check("inverse image -| direct image", ok, f"{len(left)} vs {len(right)}", **where)
            # the transpose through the unit agrees and is the only solution
            eta = unit_eta(f, q, direct_image(f, pq, limit))
            via_unit_ok = True
            for s, u in zip(left, ups):
                through = direct_image_map(f, s, eta.target, fp).compose(eta)
                if through.components != u.components:
                    via_unit_ok = False
                    break
            solutions = [sum(1 for t in right if down(t).components == s.components) for s in left]
            rep.check("transpose through eta is unique", via_unit_ok and all(n == 1 for n in solutions), **where)

            l2 = hom_enumerate(sp, q, limit)
            r2 = hom_enumerate(p, pq, limit)
            to_left, to_right = shriek_transposes(f, p, q, sp)
            rights = [to_right(lam) for lam in l2]
            lefts = [to_left(nu) for nu in r2]
            ok2 = (
                len(l2) == len(r2)
                and all(x is not None and x.is_natural() for x in lefts)
                and all(r.is_natural() for r in rights)
                and all(to_left(r).components == lam.components for r, lam in zip(rights, l2))
                and len({r.components for r in rights}) == len(rights)
            )
            rep.check("left adjoint -| inverse image", ok2, f"{len(l2)} vs {len(r2)}", **where)
            mu = unit_mu(f, p, sp)
            mu_ok = all(inverse_image_map(f, lam).compose(mu).components == r.components for lam, r in zip(l2, rights))
            rep.check("transpose through mu", mu_ok, **where)
            counts.append({"source": pi, "target": qi, "hom(f*Q,P)": len(left), "hom(Q,f_*P)": len(right),
                           "hom(f!P,Q)": len(l2), "hom(P,f*Q)": len(r2)})
    rep.info["counts"] = counts
    return rep


def unit_naturality_report(f: MonotoneMap, target_maps: Sequence[NatTransform],
                           source_maps: Sequence[NatTransform]) -> CheckReport:
    """``eta`` natural in ``Q`` along maps of targets, ``mu`` natural in ``P`` along maps of sources."""
    rep = CheckReport(f"units along {f.name}")
    for k, a in enumerate(target_maps):
        e1, e2 = unit_eta(f, a.source), unit_eta(f, a.target)
        push = direct_image_map(f, inverse_image_map(f, a), e1.target, e2.target)
        rep.check("eta is natural", e2.compose(a).components == push.compose(e1).components, sample=k)
        rep.check("eta is natural", e1.is_natural(), sample=k)
    for k, b in enumerate(source_maps):
        m1, m2 = unit_mu(f, b.source), unit_mu(f, b.target)
        push = inverse_image_map(f, shriek_map(f, b))
        rep.check("mu is natural", m2.compose(b).components == push.compose(m1).components, sample=k)
        rep.check("mu is natural", m1.is_natural(), sample=k)
    return rep


# the comparison maps ---------------------------------------------------------

def varpi(phi_map: MonotoneMap, psi_map: MonotoneMap, p: Presheaf, image: Presheaf | None = None):
    """``phi_* P -> psi^* P``, evaluating a family at ``psi(v)``; returns the map and its stated inverse."""
    fp = image or direct_image(phi_map, p)
    pp = inverse_image(psi_map, p)
    src = phi_map.source
    fwd = NatTransform(fp, pp, [[fam[psi_map(v)] for fam in fp.fibers[v]] for v in range(fp.poset.size)])
    back = []
    for v in range(fp.poset.size):
        a = psi_map(v)
        row = []
        for i in range(len(p.fibers[a])):
            fam = tuple(p.res[(c, a)][i] if src.le(c, a) else None for c in range(src.size))
            row.append(fp.index_of(v, fam))
        back.append(row)
    return fwd, NatTransform(pp, fp, back)


def varpi_report(phi_map: MonotoneMap, psi_map: MonotoneMap, samples: Sequence[Presheaf],
                 maps: Sequence[NatTransform] = ()) -> CheckReport:
    rep = CheckReport("varpi")
    for k, p in enumerate(samples):
        fwd, back = varpi(phi_map, psi_map, p)
        rep.check("varpi is natural", fwd.is_natural() and back.is_natural(), sample=k)
        rep.check("varpi is a bijection in every fiber", fwd.is_iso(), sample=k)
        ident = fwd.compose(back).components == NatTransform.identity(back.source).components
        ident2 = back.compose(fwd).components == NatTransform.identity(fwd.source).components
        rep.check("stated inverse of varpi", ident and ident2, sample=k)
    for k, b in enumerate(maps):
        f1, _ = varpi(phi_map, psi_map, b.source)
        f2, _ = varpi(phi_map, psi_map, b.target)
        lhs = f2.compose(direct_image_map(phi_map, b, f1.source, f2.source))
        rhs = inverse_image_map(psi_map, b).compose(f1)
        rep.check("varpi is natural in P", lhs.components == rhs.components, sample=k)
    return rep


def factorization_report(phi_c: MonotoneMap, phi_a: MonotoneMap, sharp: MonotoneMap,
                         sources: Sequence[Presheaf], targets: Sequence[Presheaf]) -> CheckReport:
    """Factorization through the proper category.

    ``phi_c: C -> V``, ``sharp: C -> A`` and ``phi_a: A -> V`` with
    ``phi_a . sharp = phi_c``; ``sources`` live on ``C``, ``targets`` on ``V``.
    """
    rep = CheckReport("factorization")
    rep.check("phi = phi . sharp", phi_a.compose(sharp).mapping == phi_c.mapping)
    for k, q in enumerate(targets):
        rep.check("sharp^* phi^* = phi^*", inverse_image(sharp, inverse_image(phi_a, q)) == inverse_image(phi_c, q),
                  sample=k)
    src, tgt = phi_c.source, phi_c.target
    for k, p in enumerate(sources):
        fp = direct_image(phi_c, p)
        sp = direct_image(sharp, p)
        fsp = direct_image(phi_a, sp)
        comps = []
        ok = True
        for v in range(tgt.size):
            row = []
            for beta in fsp.fibers[v]:
                fam = tuple(
                    sp.fibers[sharp(c)][beta[sharp(c)]][c] if tgt.le(phi_c(c), v) else None for c in range(src.size)
                )
                if fam not in fp._positions[v]:
                    ok = False
                    break
                row.append(fp.index_of(v, fam))
            comps.append(row)
        iso = ok and NatTransform(fsp, fp, comps)
        rep.check("phi_* sharp_* P ~ phi_* P", bool(ok) and iso.is_natural() and iso.is_iso(), sample=k)

        eta = unit_eta(phi_c, fp)
        big = eta.target
        inv = []
        for v in range(tgt.size):
            row = []
            for alpha in big.fibers[v]:
                fam = tuple(
                    None if alpha[c] is None else fp.fibers[phi_c(c)][alpha[c]][c] for c in range(src.size)
                )
                row.append(fp.index_of(v, fam) if fam in fp._positions[v] else -1)
            inv.append(row)
        good = eta.is_iso() and all(j >= 0 for row in inv for j in row)
        if good:
            inv_t = NatTransform(big, fp, inv)
            good = inv_t.compose(eta).components == NatTransform.identity(fp).components and \
                eta.compose(inv_t).components == NatTransform.identity(big).components
        rep.check("eta at a direct image is an iso with the stated inverse", good, sample=k)
    return rep
