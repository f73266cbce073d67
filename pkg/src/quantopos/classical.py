"""Classical observables, Lie-commutativity and commutative contexts."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, NonHermitian, TooManyObservables, UnknownLabel
from .matrix import as_matrix, commutes, hermitian_exp, is_hermitian, tau

MAX_OBSERVABLES = 16

#: A Lie-commuting set of observable labels.
CommutativeContext = frozenset


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """Ordered, labelled hermitian matrices: the classical observables."""

    dim: int
    labels: tuple[str, ...]
    matrices: tuple[np.ndarray, ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, object]]) -> "ObservableSet":
        pairs = list(pairs)
        if not pairs:
            raise InputError("observables must be nonempty")
        labels = tuple(str(lab) for lab, _ in pairs)
        if len(set(labels)) != len(labels):
            dup = sorted({lab for lab in labels if labels.count(lab) > 1})
            raise InputError(f"duplicate observable labels {dup}")
        mats = []
        dim = None
        for lab, m in pairs:
            a = as_matrix(m, dim)
            dim = a.shape[0]
            if not is_hermitian(a):
                raise NonHermitian(f"observable {lab!r} is not hermitian")
            a = (a + a.conj().T) / 2
            a.setflags(write=False)
            mats.append(a)
        return cls(dim, labels, tuple(mats))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "ObservableSet":
        return cls.from_pairs(mapping.items())

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, label: str) -> np.ndarray:
        try:
            return self.matrices[self.labels.index(label)]
        except ValueError:
            raise UnknownLabel(label) from None

    def unitary(self, label: str, k: float = 1.0) -> np.ndarray:
        return hermitian_exp(self[label], k)

    def sort_key(self, ctx: Iterable[str]) -> tuple:
        """Deterministic order: by size, then lexicographically on sorted labels."""
        members = sorted(ctx)
        return (len(members), members)


def lie_commutes(obs: ObservableSet, a: str, b: str) -> bool:
    return commutes(obs[a], obs[b])


def is_commutative(obs: ObservableSet, labels: Iterable[str]) -> bool:
    labels = list(labels)
    return all(lie_commutes(obs, a, b) for a, b in itertools.combinations(labels, 2))


def enumerate_commutative_subsets(obs: ObservableSet) -> list[CommutativeContext]:
    """All Lie-commuting subsets of ``obs`` (the empty set included)."""
    m = len(obs)
    if m > MAX_OBSERVABLES:
        raise TooManyObservables(f"{m} observables exceed the limit of {MAX_OBSERVABLES}")
    ok = [0] * m
    for i, j in itertools.combinations(range(m), 2):
        if lie_commutes(obs, obs.labels[i], obs.labels[j]):
            ok[i] |= 1 << j
            ok[j] |= 1 << i
    found = []
    for mask in range(1 << m):
        members = [i for i in range(m) if mask >> i & 1]
        if all((mask & ~(1 << i)) & ~ok[i] == 0 for i in members):
            found.append(CommutativeContext(obs.labels[i] for i in members))
    return sorted(found, key=obs.sort_key)


@dataclass(frozen=True)
class PrequantizationCategory:
    """A full subcategory of the commutative-subset category (inclusions implicit)."""

    objects: tuple[CommutativeContext, ...]

    @classmethod
    def of(cls, obs: ObservableSet, contexts: Iterable[Iterable[str]]) -> "PrequantizationCategory":
        objs = {CommutativeContext(c) for c in contexts}
        for c in objs:
            for lab in c:
                obs[lab]
            if not is_commutative(obs, c):
                raise InputError(f"context {sorted(c)} is not Lie-commutative")
        return cls(tuple(sorted(objs, key=obs.sort_key)))

    def __contains__(self, ctx) -> bool:
        return CommutativeContext(ctx) in self.objects

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects)

    def index(self, ctx) -> int:
        return self.objects.index(CommutativeContext(ctx))

    def issubcategory(self, other: "PrequantizationCategory") -> bool:
        return set(self.objects) <= set(other.objects)


def full_category(obs: ObservableSet) -> PrequantizationCategory:
    return PrequantizationCategory(tuple(enumerate_commutative_subsets(obs)))


def context_name(ctx: Iterable[str]) -> str:
    return "{" + ",".join(sorted(ctx)) + "}"


@dataclass
class FaithfulnessReport:
    k: float
    upsilon_violations: list[tuple[str, str]] = field(default_factory=list)
    unitary_violations: list[tuple[str, str]] = field(default_factory=list)
    collisions: dict[str, list[tuple[float, float]]] = field(default_factory=dict)

    @property
    def faithful(self) -> bool:
        return not self.upsilon_violations and not self.unitary_violations

    @property
    def collision_free(self) -> bool:
        return not self.collisions


def _distinct(values: np.ndarray, tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(float(v))
    return out


def spectral_collisions(a: np.ndarray, k: float) -> list[tuple[float, float]]:
    """Pairs of distinct eigenvalues whose gap is a nonzero multiple of ``2 pi / k``."""
    t = tau(a)
    eig = _distinct(np.linalg.eigvalsh(a), t)
    hits = []
    for lo, hi in itertools.combinations(eig, 2):
        phase = k * (hi - lo)
        turns = round(phase / (2 * math.pi))
        if turns != 0 and abs(phase - 2 * math.pi * turns) <= t * max(1.0, abs(k)):
            hits.append((lo, hi))
    return hits


def faithfulness_report(obs: ObservableSet, k: float = 1.0) -> FaithfulnessReport:
    rep = FaithfulnessReport(k)
    unitaries = [obs.unitary(lab, k) for lab in obs.labels]
    for (i, a), (j, b) in itertools.combinations(enumerate(obs.labels), 2):
        ma, mb = obs.matrices[i], obs.matrices[j]
        if np.linalg.norm(ma - mb) <= tau(ma, mb):
            rep.upsilon_violations.append((a, b))
        ua, ub = unitaries[i], unitaries[j]
        if np.linalg.norm(ua - ub) <= tau(ua, ub):
            rep.unitary_violations.append((a, b))
    for lab, m in zip(obs.labels, obs.matrices):
        hits = spectral_collisions(m, k)
        if hits:
            rep.collisions[lab] = hits
    return rep
