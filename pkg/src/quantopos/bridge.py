"""The Galois connection between commutative contexts and matrix algebras.

``phi`` sends a Lie-commuting set of labels to the double commutant of its
exponentials; ``psi`` sends an algebra to the labels whose exponential it
contains.  A :class:`ContextPoset` is the finite inclusion poset of algebras
on which everything downstream is computed, together with the coclosure
table ``flat = phi . psi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .classical import (
    CommutativeContext,
    ObservableSet,
    PrequantizationCategory,
    context_name,
    enumerate_commutative_subsets,
    faithfulness_report,
    is_commutative,
)
from .errors import FlatEscapesPoset, InputError, NonCommutativePreimage, QuantoposError, TooManyObservables
from .matrix import StarAlgebra, double_commutant, generated_star_algebra, scalar_algebra
from .poset import FinitePoset, MonotoneMap
from .report import CheckReport

MAX_CONTEXTS = 4096
BOTTOM_NAME = "CI"


def exponentials(ctx: Iterable[str], obs: ObservableSet, k: float = 1.0) -> list[np.ndarray]:
    out = []
    for label in sorted(ctx):
        u = obs.unitary(label, k)
        out += [u, u.conj().T]
    return out


def phi(ctx: Iterable[str], obs: ObservableSet, k: float = 1.0) -> StarAlgebra:
    return double_commutant(exponentials(ctx, obs, k), obs.dim, expect_commutative=True)


def psi(alg: StarAlgebra, obs: ObservableSet, k: float = 1.0) -> CommutativeContext:
    found = CommutativeContext(lab for lab in obs.labels if alg.contains(obs.unitary(lab, k)))
    if not is_commutative(obs, found):
        raise NonCommutativePreimage(
            f"labels {sorted(found)} land in a commutative algebra but do not commute; "
            "the exponential map is not faithful"
        )
    return found


def sharp(ctx: Iterable[str], obs: ObservableSet, k: float = 1.0) -> CommutativeContext:
    return psi(phi(ctx, obs, k), obs, k)


def proper_category(obs: ObservableSet, k: float = 1.0) -> PrequantizationCategory:
    """Contexts fixed by ``sharp``."""
    fixed = [c for c in enumerate_commutative_subsets(obs) if sharp(c, obs, k) == c]
    return PrequantizationCategory(tuple(fixed))


@dataclass(frozen=True)
class FlatPoset:
    """A finite poset with a coclosure table; all the topology needs."""

    poset: FinitePoset
    flat: tuple[int, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return self.poset.names

    def flat_map(self) -> MonotoneMap:
        return MonotoneMap(self.poset, self.poset, self.flat, "flat")

    @property
    def fixpoints(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.poset.size) if self.flat[v] == v)

    def invariant_violations(self) -> list[str]:
        p, fl = self.poset, self.flat
        out = []
        if len(fl) != p.size:
            return [f"flat table has {len(fl)} entries for {p.size} objects"]
        for v in range(p.size):
            if not 0 <= fl[v] < p.size:
                out.append(f"flat({p.names[v]}) escapes the poset")
                continue
            if not p.le(fl[v], v):
                out.append(f"flat({p.names[v]}) = {p.names[fl[v]]} is not below {p.names[v]}")
            elif fl[fl[v]] != fl[v]:
                out.append(f"flat is not idempotent at {p.names[v]}")
        for lo, hi in p.pairs:
            if all(0 <= fl[x] < p.size for x in (lo, hi)) and not p.le(fl[lo], fl[hi]):
                out.append(f"flat is not monotone on {p.names[lo]} <= {p.names[hi]}")
        return out


@dataclass(frozen=True, eq=False)
class ContextPoset(FlatPoset):
    """Finite surrogate for the poset of commutative subalgebras.

    Objects are sorted by algebra dimension (then discovery order), which is
    a linear extension of inclusion, so index 0 is always the scalars.
    """

    obs: ObservableSet = None
    k: float = 1.0
    algebras: tuple[StarAlgebra, ...] = ()
    psi_table: tuple[CommutativeContext, ...] = ()
    classical: PrequantizationCategory = None
    phi_table: tuple[int, ...] = ()
    bottom: int = 0

    @property
    def contexts(self) -> tuple[StarAlgebra, ...]:
        return self.algebras

    @property
    def leq(self):
        return self.poset.leq

    @property
    def flat_table(self) -> tuple[int, ...]:
        return self.flat

    def index(self, name) -> int:
        return self.poset.index(name)

    def phi_index(self, ctx) -> int:
        return self.phi_table[self.classical.index(ctx)]

    def check_invariants(self) -> list[str]:
        out = self.invariant_violations()
        p = self.poset
        if p.bottom != self.bottom or not self.algebras[self.bottom].span_equal(scalar_algebra(self.obs.dim)):
            out.append("scalars are not the minimum")
        return out

    @cached_property
    def classical_poset(self) -> FinitePoset:
        objs = self.classical.objects
        return FinitePoset.from_table([[a <= b for b in objs] for a in objs], [context_name(c) for c in objs])

    def phi_map(self) -> MonotoneMap:
        return MonotoneMap(self.classical_poset, self.poset, self.phi_table, "phi")

    def psi_map(self, category: PrequantizationCategory | None = None) -> MonotoneMap:
        from .errors import ProperCategoryMissing

        cat = category or self.classical
        target = self.classical_poset if category is None else category_poset(cat)
        images = []
        for v, ctx in enumerate(self.psi_table):
            if ctx not in cat:
                raise ProperCategoryMissing(
                    f"psi({self.names[v]}) = {context_name(ctx)} is not an object of the chosen category"
                )
            images.append(cat.index(ctx))
        return MonotoneMap(self.poset, target, tuple(images), "psi")

    def sharp_table(self) -> tuple[int, ...]:
        return tuple(self.classical.index(self.psi_table[self.phi_table[c]]) for c in range(len(self.classical)))

    def proper(self) -> PrequantizationCategory:
        sh = self.sharp_table()
        return PrequantizationCategory(tuple(c for i, c in enumerate(self.classical.objects) if sh[i] == i))

    def sharp_map(self) -> tuple[MonotoneMap, MonotoneMap]:
        """``sharp`` as a map onto the proper category, and the inclusion back."""
        proper = self.proper()
        ap = category_poset(proper)
        sh = self.sharp_table()
        onto = MonotoneMap(
            self.classical_poset, ap, tuple(proper.index(self.classical.objects[sh[c]]) for c in range(len(sh))),
            "sharp",
        )
        incl = MonotoneMap(ap, self.classical_poset, tuple(self.classical.index(c) for c in proper.objects), "incl")
        return onto, incl

    def flat_fixpoint_poset(self) -> tuple[FinitePoset, MonotoneMap]:
        """The fixpoint subposet of ``flat`` and its inclusion."""
        fix = self.fixpoints
        sub = self.poset.subposet(fix)
        return sub, MonotoneMap(sub, self.poset, fix, "incl")

    def __repr__(self) -> str:
        return f"ContextPoset({list(self.names)}, flat={[self.names[v] for v in self.flat]})"


def category_poset(cat: PrequantizationCategory) -> FinitePoset:
    objs = cat.objects
    return FinitePoset.from_table([[a <= b for b in objs] for a in objs], [context_name(c) for c in objs])


def _find(algs: Sequence[StarAlgebra], alg: StarAlgebra) -> int | None:
    for i, a in enumerate(algs):
        if a.span_equal(alg):
            return i
    return None


def build_context_poset(
    obs: ObservableSet,
    extras: Sequence = (),
    k: float = 1.0,
) -> ContextPoset:
    """Scalars, every ``phi``-image and every extra context, deduplicated by span.

    ``extras`` items are either ``(name, generators)`` pairs or bare generator
    lists (named ``X0``, ``X1``, ...).
    """
    if k == 0:
        raise InputError("k must be nonzero")
    subsets = enumerate_commutative_subsets(obs)
    if len(subsets) > MAX_CONTEXTS:
        raise TooManyObservables(f"{len(subsets)} commutative subsets exceed the limit of {MAX_CONTEXTS}")
    classical = PrequantizationCategory(tuple(subsets))

    algs: list[StarAlgebra] = [scalar_algebra(obs.dim)]
    names: list[str] = [BOTTOM_NAME]
    phi_raw = []
    for c in subsets:
        a = phi(c, obs, k)
        i = _find(algs, a)
        if i is None:
            algs.append(a)
            names.append("phi" + context_name(c))
            i = len(algs) - 1
        phi_raw.append(i)
    for j, item in enumerate(extras):
        if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str):
            name, gens = item
        else:
            name, gens = f"X{j}", item
        a = generated_star_algebra(list(gens), obs.dim)
        if _find(algs, a) is None:
            if name in names:
                raise InputError(f"duplicate context name {name!r}")
            algs.append(a)
            names.append(name)

    order = sorted(range(len(algs)), key=lambda i: (algs[i].dimension, i))
    pos = {old: new for new, old in enumerate(order)}
    algs = [algs[i] for i in order]
    names = [names[i] for i in order]
    leq = [[a.issubset(b) for b in algs] for a in algs]
    poset = FinitePoset.from_table(leq, names)

    psi_table = tuple(psi(a, obs, k) for a in algs)
    phi_table = tuple(pos[i] for i in phi_raw)
    flat = []
    for v, ctx in enumerate(psi_table):
        if ctx not in classical:
            raise FlatEscapesPoset(f"psi({names[v]}) = {context_name(ctx)} is not a commutative subset")
        flat.append(phi_table[classical.index(ctx)])
    cp = ContextPoset(
        poset=poset,
        flat=tuple(flat),
        obs=obs,
        k=k,
        algebras=tuple(algs),
        psi_table=psi_table,
        classical=classical,
        phi_table=phi_table,
        bottom=0,
    )
    problems = cp.check_invariants()
    if problems:
        raise QuantoposError("context poset invariants fail: " + "; ".join(problems))
    return cp


def galois_report(obs: ObservableSet, cp: ContextPoset) -> CheckReport:
    """Exhaustively check the Galois-connection laws on ``cp``.

    The tables stored on ``cp`` are checked against each other and against a
    fresh numerical computation of ``phi`` and ``psi``, so a tampered table is
    caught.
    """
    rep = CheckReport("galois")
    p, classical = cp.poset, cp.classical
    cats = classical.objects
    names = p.names
    cname = [context_name(c) for c in cats]

    for i, c in enumerate(cats):
        fresh = phi(c, obs, cp.k)
        rep.check("phi table", fresh.span_equal(cp.algebras[cp.phi_table[i]]), context=cname[i])
    for v, a in enumerate(cp.algebras):
        rep.check("psi table", psi(a, obs, cp.k) == cp.psi_table[v], algebra=names[v])

    def cidx(ctx):
        return classical.index(ctx) if ctx in classical else None

    ph = cp.phi_table
    ps = [cidx(ctx) for ctx in cp.psi_table]
    sh = [ps[ph[i]] for i in range(len(cats))]

    for i, c in enumerate(cats):
        for v in range(p.size):
            rep.check(
                "adjunction", p.le(ph[i], v) == (c <= cp.psi_table[v]), context=cname[i], algebra=names[v]
            )
        rep.check("C <= sharp C", c <= cats[sh[i]], context=cname[i])
        rep.check("phi psi phi = phi", ph[ps[ph[i]]] == ph[i], context=cname[i])
        rep.check("sharp sharp = sharp", sh[sh[i]] == sh[i], context=cname[i])
        rep.check("phi = phi . sharp", ph[sh[i]] == ph[i], context=cname[i])
    for v in range(p.size):
        fl = cp.flat[v]
        rep.check("flat V <= V", p.le(fl, v), algebra=names[v])
        rep.check("psi phi psi = psi", ps[ph[ps[v]]] == ps[v], algebra=names[v])
        rep.check("flat flat = flat", cp.flat[fl] == fl, algebra=names[v])
        rep.check("flat = phi . psi", fl == ph[ps[v]], algebra=names[v])

    proper = [i for i in range(len(cats)) if sh[i] == i]
    fixed = [v for v in range(p.size) if cp.flat[v] == v]
    psi_image = sorted({ps[v] for v in range(p.size)})
    rep.check("A = psi image", psi_image == proper, detail=f"psi image {[cname[i] for i in psi_image]}")
    fwd = {i: ph[i] for i in proper}
    back = {v: ps[v] for v in fixed}
    iso = (
        sorted(fwd.values()) == fixed
        and sorted(back.values()) == proper
        and all(back[fwd[i]] == i for i in proper)
        and all(fwd[back[v]] == v for v in fixed)
    )
    if not iso:
        bad = [names[v] for v in fixed if v not in back or back[v] not in fwd or fwd[back[v]] != v]
        rep.fail("A ~ V_flat order isomorphism", detail="phi and psi are not inverse bijections",
                 algebra=",".join(bad) or "-")
    else:
        rep.law("A ~ V_flat order isomorphism")
        for i in proper:
            for j in proper:
                rep.check("A ~ V_flat order isomorphism", (cats[i] <= cats[j]) == p.le(fwd[i], fwd[j]),
                          context=f"{cname[i]}<={cname[j]}")
    rep.info = {
        "proper_category": [cname[i] for i in proper],
        "flat_fixpoints": [names[v] for v in fixed],
    }
    return rep


@dataclass(frozen=True)
class KInvarianceEntry:
    k: float
    context: str
    equal: bool
    dim_k: int
    dim_one: int
    collisions: tuple[str, ...]

    @property
    def status(self) -> str:
        if self.equal:
            return "equal"
        return "degenerate-spectrum: unequal" if self.collisions else "unequal"


def k_invariance_report(obs: ObservableSet, ks: Sequence[float]) -> CheckReport:
    """Compare ``phi`` at each ``k`` with ``phi`` at 1 on every context.

    An inequality accompanied by a spectral collision (at ``k`` or at 1) is
    informational; only an unexplained inequality is a failure.
    """
    rep = CheckReport("k-invariance")
    rep.law("phi_k = phi")
    subsets = enumerate_commutative_subsets(obs)
    base = {c: phi(c, obs, 1.0) for c in subsets}
    flagged_one = set(faithfulness_report(obs, 1.0).collisions)
    entries = []
    for k in ks:
        if k == 0:
            raise InputError("k = 0 is not allowed in k-invariance checks")
        flagged = set(faithfulness_report(obs, k).collisions) | flagged_one
        for c in subsets:
            ak = phi(c, obs, k)
            e = KInvarianceEntry(
                float(k), context_name(c), ak.span_equal(base[c]), ak.dimension, base[c].dimension,
                tuple(sorted(flagged & set(c))),
            )
            entries.append(e)
            if e.status == "unequal":
                rep.fail("phi_k = phi", f"dimension {e.dim_k} vs {e.dim_one}", k=k, context=e.context)
    rep.info = {
        "entries": [
            {"k": e.k, "context": e.context, "status": e.status, "collisions": list(e.collisions)}
            for e in entries
        ]
    }
    return rep
