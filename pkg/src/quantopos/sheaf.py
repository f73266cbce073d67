"""Sheaves for the flat topology: three independent criteria and the sheaf topos checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bridge import ContextPoset, FlatPoset
from .errors import SearchSpaceTooLarge, SheafCriteriaDisagree
from .geometric import direct_image, inverse_image, inverse_image_map
from .poset import MonotoneMap
from .presheaf import (
    NatTransform,
    Presheaf,
    Subobject,
    all_subobjects,
    empty_presheaf,
    find_isomorphism,
    hom_enumerate,
    one_down,
    one_omega,
    q_down,
    terminal,
)
from .report import CheckReport
from .sampling import random_presheaves
from .topology import closure, grothendieck_J, is_dense, lt_j, sheafify, zeta
from .topos import equalizer, exponential, exponential_bijection_report, omega, product, pullback


def default_phi(fp: FlatPoset) -> MonotoneMap:
    """The map used by the external criterion.

    For a context poset this is the quantization map from the commutative
    subsets; for a bare table it is the inclusion of the flat fixpoints.
    """
    if isinstance(fp, ContextPoset):
        return fp.phi_map()
    _, incl = _fixpoint_inclusion(fp)
    return incl


def _fixpoint_inclusion(fp: FlatPoset):
    fix = fp.fixpoints
    sub = fp.poset.subposet(fix)
    return sub, MonotoneMap(sub, fp.poset, fix, "incl")


@dataclass
class SheafVerdict:
    zeta_iso: bool
    j_sheaf_extension: bool
    external_phi_star: bool
    witness: Presheaf | None = None
    iso: NatTransform | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.zeta_iso == self.j_sheaf_extension == self.external_phi_star

    @property
    def is_sheaf(self) -> bool:
        return self.agree and self.zeta_iso

    def __bool__(self) -> bool:
        return self.is_sheaf


def extension_failure(r: Presheaf, fp: FlatPoset) -> str | None:
    """First covering sieve along which maps into ``r`` fail to extend uniquely."""
    ps = fp.poset
    jt = grothendieck_J(fp)
    for v in range(ps.size):
        full = hom_enumerate(one_down(ps, v), r)
        for mask in jt.covers(v):
            part = hom_enumerate(one_omega(ps, (v, mask)), r)
            cut = {
                tuple(c if mask >> w & 1 else () for w, c in enumerate(a.components)) for a in full
            }
            if len(cut) != len(full) or len(part) != len(full):
                return f"{len(part)} maps from the sieve {ps.mask_names(mask)} at {ps.names[v]}, {len(full)} from the downset"
    return None


def is_sheaf(r: Presheaf, fp: FlatPoset, phi: MonotoneMap | None = None, strict: bool = True) -> SheafVerdict:
    phi = phi or default_phi(fp)
    v1 = zeta(r, fp).is_iso()
    why = extension_failure(r, fp)
    witness = inverse_image(phi, r)
    iso = find_isomorphism(r, direct_image(phi, witness))
    verdict = SheafVerdict(v1, why is None, iso is not None, witness, iso)
    if why:
        verdict.notes.append(why)
    if strict and not verdict.agree:
        raise SheafCriteriaDisagree(
            f"sheaf criteria disagree on {r!r}: zeta {v1}, extension {why is None}, external {iso is not None}",
            verdict,
        )
    return verdict


# the classifier of the sheaf topos ----------------------------------------------

@dataclass(frozen=True, eq=False)
class OmegaJ:
    """Fixed sieves of ``j`` with the inverse ``rho`` of ``zeta``."""

    sub: Subobject
    presheaf: Presheaf
    rho: NatTransform
    zeta: NatTransform

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.presheaf.sizes


def omega_j(fp: FlatPoset) -> OmegaJ:
    ps = fp.poset
    om = omega(ps)
    j = lt_j(fp)
    sub = Subobject(om, [{i for i, m in enumerate(om.fibers[v]) if j.apply(v, m) == m} for v in range(ps.size)])
    oj = sub.to_presheaf()
    z = zeta(oj, fp)
    flat_oj = z.target
    comps = []
    for v in range(ps.size):
        row = []
        for m in flat_oj.fibers[v]:
            row.append(oj.index_of(v, sum(1 << w for w in ps.down(v) if m >> fp.flat[w] & 1)))
        comps.append(row)
    return OmegaJ(sub, oj, NatTransform(flat_oj, oj, comps), z)


def omega_j_report(fp: FlatPoset, oj: OmegaJ | None = None) -> CheckReport:
    oj = oj or omega_j(fp)
    rep = CheckReport("sheaf classifier")
    bad = oj.sub.violation()
    rep.check("fixed sieves form a subobject", bad is None, str(bad) if bad else "")
    rep.check("rho is natural", oj.rho.is_natural())
    ident = NatTransform.identity(oj.presheaf).components
    rep.check("rho inverts zeta", oj.rho.compose(oj.zeta).components == ident)
    rep.check("zeta inverts rho", oj.zeta.compose(oj.rho).components == NatTransform.identity(oj.zeta.target).components)
    v = is_sheaf(oj.presheaf, fp, strict=False)
    rep.check("the classifier is a sheaf", v.is_sheaf and v.agree)
    rep.info = {"sizes": dict(zip(fp.poset.names, oj.sizes))}
    return rep


def classification_report(r: Presheaf, fp: FlatPoset, oj: OmegaJ | None = None) -> CheckReport:
    """Closed subobjects, subsheaves and ``j``-fixed characteristic maps of a sheaf agree."""
    from .topos import characteristic_morphism

    oj = oj or omega_j(fp)
    j = lt_j(fp)
    rep = CheckReport("closed subobjects")
    subs = all_subobjects(r)
    closed = [s for s in subs if closure(s, fp) == s]
    subsheaves = [s for s in subs if zeta(s.to_presheaf(), fp).is_iso()]
    rep.check("closed subobjects are the subsheaves", set(closed) == set(subsheaves),
              f"{len(closed)} closed, {len(subsheaves)} subsheaves")
    om = omega(fp.poset)
    fixed = [chi for chi in hom_enumerate(r, om) if j.morphism.compose(chi).components == chi.components]
    chars = [characteristic_morphism(s) for s in closed]
    rep.check("closed subobjects biject with j-fixed maps",
              {c.components for c in chars} == {c.components for c in fixed} and len(chars) == len(fixed),
              f"{len(chars)} vs {len(fixed)}")
    into = hom_enumerate(r, oj.presheaf)
    members = [sorted(s) for s in oj.sub.subsets]
    lifted = {tuple(tuple(members[v][k] for k in comp) for v, comp in enumerate(t.components)) for t in into}
    rep.check("j-fixed maps are the maps into the classifier", lifted == {c.components for c in fixed},
              f"{len(into)} maps into the classifier")
    rep.info = {"closed": len(closed), "maps_into_classifier": len(into)}
    return rep


# samples ------------------------------------------------------------------------

def standard_samples(fp: FlatPoset, seed: int = 0, randoms: int = 40, fixtures: Sequence[Presheaf] = (),
                     max_fiber: int = 3) -> list[Presheaf]:
    """Fixtures, terminal, empty, representables, covering-sieve points, the sieve object, randoms."""
    ps = fp.poset
    out = list(fixtures) + [terminal(ps), empty_presheaf(ps)]
    out += [one_down(ps, v) for v in range(ps.size)]
    jt = grothendieck_J(fp)
    out += [one_omega(ps, (v, m)) for v in range(ps.size) for m in jt.covers(v)]
    out.append(omega(ps))
    out += random_presheaves(ps, seed, randoms, max_fiber)
    return out


def _flat_star_map(fp: FlatPoset, a: NatTransform) -> NatTransform:
    return inverse_image_map(fp.flat_map(), a)


def sheaf_suite(fp: FlatPoset, samples: Sequence[Presheaf], pair_budget: int = 8) -> CheckReport:
    """Property checks over ``samples``; pairwise checks use the first ``pair_budget`` sheaves."""
    rep = CheckReport("sheaf suite")
    ps = fp.poset
    verdicts = []
    for k, f in enumerate(samples):
        try:
            v = is_sheaf(f, fp)
        except SheafCriteriaDisagree as exc:
            rep.fail("sheaf criteria agree", str(exc), sample=k)
            verdicts.append(None)
            continue
        rep.law("sheaf criteria agree")
        verdicts.append(v)
        s = sheafify(f, fp)
        try:
            sv = is_sheaf(s, fp)
            rep.check("sheafification gives a sheaf", sv.is_sheaf, sample=k)
        except SheafCriteriaDisagree as exc:
            rep.fail("sheafification gives a sheaf", str(exc), sample=k)
        zf = zeta(f, fp)
        rep.check("zeta is natural", zf.is_natural(), sample=k)
        rep.check("sheafifying zeta gives the identity",
                  _flat_star_map(fp, zf).components == NatTransform.identity(s).components, sample=k)
        for w in range(ps.size):
            big = q_down(f, w).to_presheaf()
            small = Subobject(big, q_down(f, fp.flat[w]).subsets)
            rep.check("cut at flat V is dense in cut at V", is_dense(small, fp), sample=k, object=ps.names[w])

    jt = grothendieck_J(fp)
    for w in range(ps.size):
        amb = one_down(ps, w)
        for m in jt.covers(w):
            sub = Subobject(amb, [{0} if m >> x & 1 else set() for x in range(ps.size)])
            rep.check("covering sieves are dense", closure(sub, fp) == Subobject.whole(amb), object=ps.names[w])

    sheaves = [f for f, v in zip(samples, verdicts) if v is not None and v.is_sheaf]
    sheaves += [sheafify(f, fp) for f in samples[-pair_budget:]]
    sheaves = _dedupe(sheaves)[:pair_budget]
    objects = _dedupe(samples)[:pair_budget]
    skipped = 0

    for a, f in enumerate(objects):
        zf = zeta(f, fp)
        for b, r in enumerate(sheaves):
            try:
                zr_inv = zeta(r, fp).inverse()
                lifts = hom_enumerate(sheafify(f, fp), r)
                for alpha in hom_enumerate(f, r):
                    hat = zr_inv.compose(_flat_star_map(fp, alpha))
                    solutions = [beta for beta in lifts if beta.compose(zf).components == alpha.components]
                    ok = len(solutions) == 1 and solutions[0].components == hat.components
                    if not rep.check("maps into sheaves factor uniquely through zeta", ok, source=a, sheaf=b):
                        break
                e = exponential(f, r)
                rep.check("exponential into a sheaf is a sheaf", is_sheaf(e.obj, fp).is_sheaf, source=a, sheaf=b)
            except SearchSpaceTooLarge:
                skipped += 1

    for a, q in enumerate(sheaves):
        for b, r in enumerate(sheaves):
            if b < a:
                continue
            try:
                pr = product(q, r).apex
                rep.check("products of sheaves are sheaves", is_sheaf(pr, fp).is_sheaf, left=a, right=b)
                if b == a:
                    e = exponential(q, r)
                    rep.merge(exponential_bijection_report(q, e), "within sheaves: ")
                common = hom_enumerate(q, r)
                if common:
                    f1 = common[0]
                    f2 = common[-1]
                    rep.check("equalizers of sheaves are sheaves", is_sheaf(equalizer(f1, f2).apex, fp).is_sheaf,
                              left=a, right=b)
                    ident = NatTransform.identity(r)
                    rep.check("pullbacks of sheaves are sheaves", is_sheaf(pullback(f1, ident).apex, fp).is_sheaf,
                              left=a, right=b)
                    rep.check("pullbacks of sheaves are sheaves", is_sheaf(pullback(f1, f2).apex, fp).is_sheaf,
                              left=a, right=b)
            except SearchSpaceTooLarge:
                skipped += 1

    oj = omega_j(fp)
    rep.merge(omega_j_report(fp, oj))
    for b, r in enumerate(sheaves):
        rep.merge(classification_report(r, fp, oj))
    rep.info = {
        "samples": len(samples),
        "sheaves_among_samples": sum(1 for v in verdicts if v is not None and v.is_sheaf),
        "pairwise_sheaves": len(sheaves),
        "pairs_over_search_limit": skipped,
    }
    return rep


def _dedupe(items: Sequence[Presheaf]) -> list[Presheaf]:
    seen, out = set(), []
    for p in items:
        key = (p.fibers, tuple(sorted(p.res.items())))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out
