"""Finite presheaves on a finite poset, natural transformations and subobjects.

A presheaf stores, for every object, a tuple of hashable element labels and,
for every comparable pair ``lo <= hi``, a restriction table mapping element
indices of the ``hi`` fiber to element indices of the ``lo`` fiber.  All
algorithms work on indices; labels only matter for construction and output.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import _kernels
from .errors import InputError, NotASubobject, SearchSpaceTooLarge, ShapeMismatch
from .poset import FinitePoset

HOM_LIMIT = 10**7
POINT = "pt"


@dataclass(frozen=True)
class Violation:
    kind: str
    pair: tuple[str, ...]
    element: Hashable = None
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} at {' <= '.join(self.pair)}" + (f" (element {self.element!r})" if self.element is not None else "")


class Presheaf:
    """A functor from ``poset``-opposite to finite sets.

    Instances are treated as immutable.  Equality is structural: same poset,
    same labelled fibers, same restriction tables.
    """

    __slots__ = ("poset", "fibers", "res", "__dict__")

    def __init__(self, poset: FinitePoset, fibers: Sequence[Sequence[Hashable]], res: Mapping[tuple[int, int], Sequence[int]]):
        if len(fibers) != poset.size:
            raise ShapeMismatch(f"{len(fibers)} fibers for a poset with {poset.size} objects")
        self.poset = poset
        self.fibers = tuple(tuple(f) for f in fibers)
        self.res = {pair: tuple(res[pair]) for pair in poset.pairs}

    # construction -----------------------------------------------------
    @classmethod
    def build(cls, poset: FinitePoset, fibers, restrict: Callable[[int, int, Hashable], Hashable]) -> "Presheaf":
        """Restriction given as a function ``(lo, hi, label) -> label``."""
        fibers = [tuple(f) for f in fibers]
        pos = [{x: i for i, x in enumerate(f)} for f in fibers]
        res = {}
        for lo, hi in poset.pairs:
            res[(lo, hi)] = tuple(pos[lo][restrict(lo, hi, x)] if lo != hi else i for i, x in enumerate(fibers[hi]))
        return cls(poset, fibers, res)

    @classmethod
    def from_covers(cls, poset: FinitePoset, fibers, maps: Mapping, strict: bool = True) -> "Presheaf":
        """Restrictions given on cover pairs only; composites follow cover paths.

        ``maps`` is keyed by ``(lo, hi)`` (indices or names) and each value is a
        dict ``label -> label``, a list aligned with the ``hi`` fiber, or a
        single label (constant map).  With ``strict=False`` a label outside the
        target fiber is kept as an invalid index for :func:`validate_presheaf`
        to report.
        """
        fibers = [tuple(f) for f in fibers]
        pos = [{x: i for i, x in enumerate(f)} for f in fibers]
        cover = {}
        given = {(poset.index(a), poset.index(b)): m for (a, b), m in maps.items()}
        for lo, hi in poset.cover_pairs:
            if (lo, hi) not in given:
                if not fibers[hi]:
                    cover[(lo, hi)] = ()
                    continue
                raise InputError(f"missing restriction {poset.names[lo]} <= {poset.names[hi]}")
            m = given.pop((lo, hi))
            if isinstance(m, Mapping):
                targets = [m[x] for x in fibers[hi]]
            elif isinstance(m, list):
                if len(m) != len(fibers[hi]):
                    raise InputError(f"restriction {poset.names[lo]} <= {poset.names[hi]} has the wrong length")
                targets = m
            else:
                targets = [m] * len(fibers[hi])
            row = []
            for y in targets:
                if y in pos[lo]:
                    row.append(pos[lo][y])
                elif strict:
                    raise InputError(f"{y!r} is not in the fiber over {poset.names[lo]}")
                else:
                    row.append(-1)
            cover[(lo, hi)] = tuple(row)
        if given:
            extra = ", ".join(f"{poset.names[a]}<={poset.names[b]}" for a, b in given)
            raise InputError(f"restrictions given on non-cover pairs: {extra}")
        res: dict[tuple[int, int], tuple[int, ...]] = {}
        for hi in poset.topo_order:
            res[(hi, hi)] = tuple(range(len(fibers[hi])))
            for lo in range(poset.size):
                if lo == hi or not poset.le(lo, hi):
                    continue
                mid = next(m for m in poset.lower_covers[hi] if poset.le(lo, m))
                first, second = cover[(mid, hi)], res[(lo, mid)]
                res[(lo, hi)] = tuple(second[i] if i >= 0 else -1 for i in first)
        return cls(poset, fibers, res)

    # access --------------------------------------------------------------
    def fiber(self, v) -> tuple:
        return self.fibers[self.poset.index(v)]

    def size(self, v) -> int:
        return len(self.fiber(v))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.fibers)

    def restrict(self, lo: int, hi: int, i: int) -> int:
        return self.res[(lo, hi)][i]

    def restrict_label(self, lo, hi, label) -> Hashable:
        lo, hi = self.poset.index(lo), self.poset.index(hi)
        return self.fibers[lo][self.res[(lo, hi)][self.index_of(hi, label)]]

    def index_of(self, v, label) -> int:
        if type(v) is not int:
            v = self.poset.index(v)
        try:
            return self._positions[v][label]
        except KeyError:
            raise InputError(f"{label!r} is not in the fiber over {self.poset.names[v]}") from None

    @cached_property
    def _positions(self) -> tuple[dict, ...]:
        return tuple({x: i for i, x in enumerate(f)} for f in self.fibers)

    @cached_property
    def total(self) -> int:
        return sum(self.sizes)

    def relabel(self, fn: Callable[[int, Hashable], Hashable]) -> "Presheaf":
        return Presheaf(self.poset, [[fn(v, x) for x in f] for v, f in enumerate(self.fibers)], self.res)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Presheaf):
            return NotImplemented
        return self.poset == other.poset and self.fibers == other.fibers and self.res == other.res

    def __hash__(self) -> int:
        return hash((self.poset, self.fibers))

    def __repr__(self) -> str:
        body = ", ".join(f"{n}:{len(f)}" for n, f in zip(self.poset.names, self.fibers))
        return f"Presheaf({body})"

    def describe(self) -> dict:
        return {n: list(f) for n, f in zip(self.poset.names, self.fibers)}


def validate_presheaf(p: Presheaf) -> Violation | None:
    """First failure of the functor laws, or ``None``."""
    ps = p.poset
    n = ps.names
    for lo, hi in ps.pairs:
        row = p.res.get((lo, hi))
        if row is None or len(row) != len(p.fibers[hi]):
            return Violation("missing restriction", (n[lo], n[hi]))
        for i, j in enumerate(row):
            if not 0 <= j < len(p.fibers[lo]):
                return Violation("restriction leaves the fiber", (n[lo], n[hi]), p.fibers[hi][i])
            if lo == hi and j != i:
                return Violation("identity restriction is not the identity", (n[hi],), p.fibers[hi][i])
    for lo, mid in ps.pairs:
        for hi in ps.up(mid):
            if lo == mid or mid == hi:
                continue
            a, b, c = p.res[(lo, mid)], p.res[(mid, hi)], p.res[(lo, hi)]
            for i in range(len(p.fibers[hi])):
                if a[b[i]] != c[i]:
                    return Violation("restrictions do not compose", (n[lo], n[mid], n[hi]), p.fibers[hi][i])
    return None


# natural transformations ---------------------------------------------------

class NatTransform:
    __slots__ = ("source", "target", "components", "__dict__")

    def __init__(self, source: Presheaf, target: Presheaf, components: Sequence[Sequence[int]]):
        if source.poset != target.poset:
            raise ShapeMismatch("source and target live on different posets")
        self.source = source
        self.target = target
        self.components = tuple(tuple(c) for c in components)
        for v, comp in enumerate(self.components):
            if len(comp) != len(source.fibers[v]):
                raise ShapeMismatch(f"component at {source.poset.names[v]} has the wrong length")

    @classmethod
    def from_function(cls, source: Presheaf, target: Presheaf, fn: Callable[[int, Hashable], Hashable]) -> "NatTransform":
        return cls(source, target, [[target.index_of(v, fn(v, x)) for x in f] for v, f in enumerate(source.fibers)])

    @classmethod
    def identity(cls, p: Presheaf) -> "NatTransform":
        return cls(p, p, [range(len(f)) for f in p.fibers])

    def __call__(self, v: int, i: int) -> int:
        return self.components[v][i]

    def apply_label(self, v, label) -> Hashable:
        v = self.source.poset.index(v)
        return self.target.fibers[v][self.components[v][self.source.index_of(v, label)]]

    def naturality_violation(self) -> Violation | None:
        s, t = self.source, self.target
        n = s.poset.names
        for v, comp in enumerate(self.components):
            for j in comp:
                if not 0 <= j < len(t.fibers[v]):
                    return Violation("component leaves the target fiber", (n[v],))
        for lo, hi in s.poset.cover_pairs:
            for i in range(len(s.fibers[hi])):
                if t.res[(lo, hi)][self.components[hi][i]] != self.components[lo][s.res[(lo, hi)][i]]:
                    return Violation("naturality square fails", (n[lo], n[hi]), s.fibers[hi][i])
        return None

    def is_natural(self) -> bool:
        return self.naturality_violation() is None

    def compose(self, inner: "NatTransform") -> "NatTransform":
        """``self . inner``."""
        if inner.target != self.source:
            raise ShapeMismatch("transformations do not compose")
        return NatTransform(inner.source, self.target,
                            [[self.components[v][j] for j in comp] for v, comp in enumerate(inner.components)])

    def is_injective(self) -> bool:
        return all(len(set(c)) == len(c) for c in self.components)

    def is_iso(self) -> bool:
        return self.is_injective() and all(len(c) == len(f) for c, f in zip(self.components, self.target.fibers))

    def inverse(self) -> "NatTransform":
        if not self.is_iso():
            raise InputError("transformation is not invertible")
        comps = []
        for comp in self.components:
            inv = [0] * len(comp)
            for i, j in enumerate(comp):
                inv[j] = i
            comps.append(inv)
        return NatTransform(self.target, self.source, comps)

    def image(self) -> "Subobject":
        return Subobject(self.target, [frozenset(c) for c in self.components])

    def __eq__(self, other) -> bool:
        if not isinstance(other, NatTransform):
            return NotImplemented
        return self.components == other.components and self.source == other.source and self.target == other.target

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return f"NatTransform({self.source!r} -> {self.target!r})"


# hom enumeration -------------------------------------------------------------

def _hom_problem(p: Presheaf, q: Presheaf):
    ps = p.poset
    slots: list[tuple[int, int]] = []
    slot_of: dict[tuple[int, int], int] = {}
    for v in ps.topo_order:
        for i in range(len(p.fibers[v])):
            slot_of[(v, i)] = len(slots)
            slots.append((v, i))
    domains = [len(q.fibers[v]) for v, _ in slots]
    checks = []
    for v, i in slots:
        cs = []
        for lo in ps.lower_covers[v]:
            cs.append((slot_of[(lo, p.res[(lo, v)][i])], q.res[(lo, v)]))
        checks.append(cs)
    return slots, domains, checks


def _search_bound(domains, checks) -> int:
    """Upper bound on leaves of the pruned search tree."""
    bound = 1
    for d, cs in zip(domains, checks):
        if d == 0:
            return 0
        if cs:
            _, table = cs[0]
            counts: dict[int, int] = {}
            for y in table:
                counts[y] = counts.get(y, 0) + 1
            d = max(counts.values())
        bound *= d
    return bound


def hom_enumerate(p: Presheaf, q: Presheaf, limit: int | None = None) -> list[NatTransform]:
    """Every natural transformation ``p -> q``, in a deterministic order."""
    if p.poset != q.poset:
        raise ShapeMismatch("presheaves live on different posets")
    limit = HOM_LIMIT if limit is None else limit
    slots, domains, checks = _hom_problem(p, q)
    bound = _search_bound(domains, checks)
    if bound > limit:
        raise SearchSpaceTooLarge(f"hom search bound {bound} exceeds the limit {limit}")
    out = []
    for vals in _kernels.enumerate_assignments(domains, checks):
        comps = [[0] * len(f) for f in p.fibers]
        for (v, i), y in zip(slots, vals):
            comps[v][i] = y
        out.append(NatTransform(p, q, comps))
    return out


def hom_count(p: Presheaf, q: Presheaf, limit: int | None = None) -> int:
    return len(hom_enumerate(p, q, limit))


def find_isomorphism(p: Presheaf, q: Presheaf) -> NatTransform | None:
    """Some natural isomorphism ``p -> q`` (backtracking with injectivity pruning)."""
    if p.poset != q.poset or p.sizes != q.sizes:
        return None
    slots, domains, checks = _hom_problem(p, q)
    n = len(slots)
    vals = [0] * n
    used: list[set[int]] = [set() for _ in p.fibers]

    def cands(s):
        v = slots[s][0]
        for y in range(domains[s]):
            if y in used[v]:
                continue
            if all(table[y] == vals[t] for t, table in checks[s]):
                yield y

    def walk(s) -> bool:
        if s == n:
            return True
        v = slots[s][0]
        for y in cands(s):
            vals[s] = y
            used[v].add(y)
            if walk(s + 1):
                return True
            used[v].discard(y)
        return False

    if not walk(0):
        return None
    comps = [[0] * len(f) for f in p.fibers]
    for (v, i), y in zip(slots, vals):
        comps[v][i] = y
    return NatTransform(p, q, comps)


def isomorphic(p: Presheaf, q: Presheaf) -> bool:
    return find_isomorphism(p, q) is not None


# canonical objects -----------------------------------------------------------

def terminal(poset: FinitePoset) -> Presheaf:
    return Presheaf(poset, [(POINT,)] * poset.size, {pair: (0,) for pair in poset.pairs})


def empty_presheaf(poset: FinitePoset) -> Presheaf:
    return Presheaf(poset, [()] * poset.size, {pair: () for pair in poset.pairs})


def to_terminal(p: Presheaf) -> NatTransform:
    return NatTransform(p, terminal(p.poset), [[0] * len(f) for f in p.fibers])


def _point_on(poset: FinitePoset, mask: int) -> Presheaf:
    fibers = [(POINT,) if mask >> v & 1 else () for v in range(poset.size)]
    res = {(lo, hi): (0,) if mask >> hi & 1 else () for lo, hi in poset.pairs}
    return Presheaf(poset, fibers, res)


def one_down(poset: FinitePoset, v) -> Presheaf:
    """The point presheaf supported on the principal downset of ``v``."""
    return _point_on(poset, poset.down_masks[poset.index(v)])


@dataclass(frozen=True)
class Sieve:
    at: int
    mask: int

    def members(self, poset: FinitePoset) -> list[str]:
        return poset.mask_names(self.mask)


def check_sieve(poset: FinitePoset, v, mask: int) -> None:
    from .errors import InvalidSieve

    v = poset.index(v)
    if mask & ~poset.down_masks[v]:
        raise InvalidSieve(f"sieve {poset.mask_names(mask)} is not inside the downset of {poset.names[v]}")
    if not poset.is_downset(mask):
        raise InvalidSieve(f"{poset.mask_names(mask)} is not downward closed")


def one_omega(poset: FinitePoset, sieve: Sieve | tuple[int, int]) -> Presheaf:
    """The point presheaf supported on the members of a sieve."""
    v, mask = (sieve.at, sieve.mask) if isinstance(sieve, Sieve) else sieve
    check_sieve(poset, v, mask)
    return _point_on(poset, mask)


# subobjects ------------------------------------------------------------------

class Subobject:
    """A subpresheaf, stored as element-index sets per fiber of ``ambient``."""

    __slots__ = ("ambient", "subsets", "__dict__")

    def __init__(self, ambient: Presheaf, subsets: Sequence[Iterable[int]]):
        if len(subsets) != ambient.poset.size:
            raise ShapeMismatch("one subset per object is required")
        self.ambient = ambient
        self.subsets = tuple(frozenset(s) for s in subsets)

    @classmethod
    def from_labels(cls, ambient: Presheaf, labels: Sequence[Iterable[Hashable]] | Mapping) -> "Subobject":
        if isinstance(labels, Mapping):
            labels = [labels.get(n, ()) for n in ambient.poset.names]
        out = cls(ambient, [{ambient.index_of(v, x) for x in s} for v, s in enumerate(labels)])
        out.require_valid()
        return out

    @classmethod
    def whole(cls, p: Presheaf) -> "Subobject":
        return cls(p, [range(len(f)) for f in p.fibers])

    @classmethod
    def nothing(cls, p: Presheaf) -> "Subobject":
        return cls(p, [()] * p.poset.size)

    def violation(self) -> Violation | None:
        p = self.ambient
        n = p.poset.names
        for v, s in enumerate(self.subsets):
            for i in s:
                if not 0 <= i < len(p.fibers[v]):
                    return Violation("element outside the ambient fiber", (n[v],), i)
        for lo, hi in p.poset.pairs:
            for i in self.subsets[hi]:
                if p.res[(lo, hi)][i] not in self.subsets[lo]:
                    return Violation("not closed under restriction", (n[lo], n[hi]), p.fibers[hi][i])
        return None

    def require_valid(self) -> None:
        bad = self.violation()
        if bad is not None:
            raise NotASubobject(str(bad))

    def labels(self) -> list[list[Hashable]]:
        return [[self.ambient.fibers[v][i] for i in sorted(s)] for v, s in enumerate(self.subsets)]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.subsets)

    @cached_property
    def _members(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(s)) for s in self.subsets)

    def to_presheaf(self) -> Presheaf:
        p = self.ambient
        mem = self._members
        pos = [{i: k for k, i in enumerate(m)} for m in mem]
        res = {(lo, hi): tuple(pos[lo][p.res[(lo, hi)][i]] for i in mem[hi]) for lo, hi in p.poset.pairs}
        return Presheaf(p.poset, [[p.fibers[v][i] for i in m] for v, m in enumerate(mem)], res)

    def inclusion(self) -> NatTransform:
        return NatTransform(self.to_presheaf(), self.ambient, self._members)

    def meet(self, other: "Subobject") -> "Subobject":
        return Subobject(self.ambient, [a & b for a, b in zip(self.subsets, other.subsets)])

    def join(self, other: "Subobject") -> "Subobject":
        return Subobject(self.ambient, [a | b for a, b in zip(self.subsets, other.subsets)])

    def __and__(self, other):
        return self.meet(other)

    def __or__(self, other):
        return self.join(other)

    def __le__(self, other: "Subobject") -> bool:
        return all(a <= b for a, b in zip(self.subsets, other.subsets))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subobject):
            return NotImplemented
        return self.subsets == other.subsets and self.ambient == other.ambient

    def __hash__(self) -> int:
        return hash(self.subsets)

    def __repr__(self) -> str:
        return "Subobject(" + ", ".join(f"{n}:{sorted(map(str, ls))}" for n, ls in zip(self.ambient.poset.names, self.labels())) + ")"


def q_down(q: Presheaf, v) -> Subobject:
    """``q`` cut down to the principal downset of ``v``."""
    ps = q.poset
    mask = ps.down_masks[ps.index(v)]
    return Subobject(q, [range(len(f)) if mask >> w & 1 else () for w, f in enumerate(q.fibers)])


def pullback_subobject(f: NatTransform, s: Subobject) -> Subobject:
    """Inverse image of a subobject of ``f.target`` along ``f``."""
    return Subobject(f.source, [{i for i, j in enumerate(c) if j in s.subsets[v]} for v, c in enumerate(f.components)])


def _element_order(p: Presheaf):
    """Elements of ``p`` in a linear extension of the category of elements."""
    ps = p.poset
    elems = [(v, i) for v in ps.topo_order for i in range(len(p.fibers[v]))]
    bit = {e: k for k, e in enumerate(elems)}
    below = []
    for v, i in elems:
        m = 0
        for lo in ps.down(v):
            if lo != v:
                m |= 1 << bit[(lo, p.res[(lo, v)][i])]
        below.append(m)
    return elems, below


def all_subobjects(p: Presheaf) -> list[Subobject]:
    """Every subpresheaf of ``p`` (downsets of its category of elements)."""
    elems, below = _element_order(p)
    out = []
    for mask in _kernels.enumerate_downsets(list(range(len(elems))), below):
        subsets = [set() for _ in p.fibers]
        k = 0
        while mask:
            if mask & 1:
                v, i = elems[k]
                subsets[v].add(i)
            mask >>= 1
            k += 1
        out.append(Subobject(p, subsets))
    return out
