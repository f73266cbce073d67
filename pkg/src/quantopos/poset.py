"""Finite posets and monotone maps between them.

Objects are the integers ``0..n-1``; ``names`` carry labels for reporting.
Downsets are stored as Python ``int`` bitmasks over object indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InputError, UnknownObject


def order_violation(leq: Sequence[Sequence[bool]]) -> str | None:
    """First failing partial-order axiom of ``leq``, or ``None``."""
    n = len(leq)
    for row in leq:
        if len(row) != n:
            return "relation table is not square"
    for a in range(n):
        if not leq[a][a]:
            return f"not reflexive at {a}"
        for b in range(n):
            if a != b and leq[a][b] and leq[b][a]:
                return f"not antisymmetric at ({a}, {b})"
            if leq[a][b]:
                for c in range(n):
                    if leq[b][c] and not leq[a][c]:
                        return f"not transitive at ({a}, {b}, {c})"
    return None


@dataclass(frozen=True)
class FinitePoset:
    leq: tuple[tuple[bool, ...], ...]
    names: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != len(self.leq):
            raise InputError("names and relation table have different sizes")
        if len(set(self.names)) != len(self.names):
            raise InputError("object names must be unique")
        problem = order_violation(self.leq)
        if problem:
            raise InputError(f"not a partial order: {problem}")

    @classmethod
    def from_table(cls, leq, names: Sequence[str] | None = None) -> "FinitePoset":
        table = tuple(tuple(bool(x) for x in row) for row in leq)
        if names is None:
            names = [str(i) for i in range(len(table))]
        return cls(table, tuple(str(x) for x in names))

    @classmethod
    def from_relation(cls, names: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "FinitePoset":
        """Reflexive-transitive closure of ``lo <= hi`` pairs given by name."""
        idx = {name: i for i, name in enumerate(names)}
        n = len(names)
        rel = [[i == j for j in range(n)] for i in range(n)]
        for lo, hi in pairs:
            rel[idx[lo]][idx[hi]] = True
        for k in range(n):
            for i in range(n):
                if rel[i][k]:
                    for j in range(n):
                        if rel[k][j]:
                            rel[i][j] = True
        return cls.from_table(rel, names)

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        return cls.from_table([[i <= j for j in range(n)] for i in range(n)])

    @property
    def size(self) -> int:
        return len(self.leq)

    def __len__(self) -> int:
        return self.size

    def le(self, a: int, b: int) -> bool:
        return self.leq[a][b]

    def index(self, name) -> int:
        if isinstance(name, int) and 0 <= name < self.size:
            return name
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownObject(str(name)) from None

    @cached_property
    def down_masks(self) -> tuple[int, ...]:
        return tuple(
            sum(1 << a for a in range(self.size) if self.leq[a][v]) for v in range(self.size)
        )

    def down(self, v: int) -> list[int]:
        return [a for a in range(self.size) if self.leq[a][v]]

    def up(self, v: int) -> list[int]:
        return [b for b in range(self.size) if self.leq[v][b]]

    @cached_property
    def lower_covers(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for v in range(self.size):
            below = [a for a in range(self.size) if a != v and self.leq[a][v]]
            out.append(tuple(a for a in below if not any(a != b and self.leq[a][b] for b in below)))
        return tuple(out)

    @cached_property
    def cover_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((lo, hi) for hi in range(self.size) for lo in self.lower_covers[hi])

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Every comparable ``(lo, hi)``, identities included."""
        return tuple((lo, hi) for hi in range(self.size) for lo in range(self.size) if self.leq[lo][hi])

    @cached_property
    def topo_order(self) -> tuple[int, ...]:
        """A linear extension, bottom elements first."""
        return tuple(sorted(range(self.size), key=lambda v: (bin(self.down_masks[v]).count("1"), v)))

    @cached_property
    def bottom(self) -> int | None:
        for v in range(self.size):
            if all(self.leq[v][w] for w in range(self.size)):
                return v
        return None

    def is_downset(self, mask: int) -> bool:
        return all(self.down_masks[v] & ~mask == 0 for v in range(self.size) if mask >> v & 1)

    def mask_members(self, mask: int) -> list[int]:
        return [v for v in range(self.size) if mask >> v & 1]

    def mask_names(self, mask: int) -> list[str]:
        return [self.names[v] for v in self.mask_members(mask)]

    def mask_of(self, members: Iterable) -> int:
        return sum(1 << self.index(m) for m in set(members))

    def subposet(self, indices: Sequence[int]) -> "FinitePoset":
        return FinitePoset.from_table(
            [[self.leq[a][b] for b in indices] for a in indices], [self.names[a] for a in indices]
        )

    def __repr__(self) -> str:
        return f"FinitePoset({list(self.names)})"


@dataclass(frozen=True)
class MonotoneMap:
    source: FinitePoset
    target: FinitePoset
    mapping: tuple[int, ...]
    name: str = "f"

    def __post_init__(self):
        if len(self.mapping) != self.source.size:
            raise InputError(f"{self.name}: mapping has {len(self.mapping)} entries for {self.source.size} objects")
        for v in self.mapping:
            if not 0 <= v < self.target.size:
                raise InputError(f"{self.name}: image {v} outside the target")
        for a, b in self.source.pairs:
            if not self.target.le(self.mapping[a], self.mapping[b]):
                raise InputError(
                    f"{self.name} is not monotone: {self.source.names[a]} <= {self.source.names[b]} "
                    "but the images are not ordered"
                )

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    @classmethod
    def identity(cls, poset: FinitePoset) -> "MonotoneMap":
        return cls(poset, poset, tuple(range(poset.size)), "id")

    def compose(self, inner: "MonotoneMap") -> "MonotoneMap":
        """``self o inner``."""
        if inner.target != self.source:
            raise InputError("maps do not compose")
        return MonotoneMap(inner.source, self.target, tuple(self.mapping[v] for v in inner.mapping),
                           f"{self.name}.{inner.name}")
