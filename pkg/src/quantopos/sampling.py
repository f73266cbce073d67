"""Seeded random presheaves for property checks."""

from __future__ import annotations

import random

from .poset import FinitePoset
from .presheaf import Presheaf, hom_enumerate, terminal


def random_presheaf(poset: FinitePoset, rng: random.Random, max_fiber: int = 3) -> Presheaf:
    """Build fibers bottom-up; each new element picks a compatible family below it."""
    fibers: list[list[str]] = [[] for _ in range(poset.size)]
    families: list[list[dict[int, int]]] = [[] for _ in range(poset.size)]
    for v in poset.topo_order:
        below = [w for w in poset.topo_order if w != v and poset.le(w, v)]
        if below:
            sub = poset.subposet(below)
            part = Presheaf(
                sub,
                [fibers[w] for w in below],
                {(a, b): tuple(families[below[b]][i][below[a]] if a != b else i
                               for i in range(len(fibers[below[b]])))
                 for a, b in sub.pairs},
            )
            options = [
                {below[k]: t.components[k][0] for k in range(len(below))}
                for t in hom_enumerate(terminal(sub), part)
            ]
        else:
            options = [{}]
        n = rng.randint(0, max_fiber) if options else 0
        for k in range(n):
            fibers[v].append(f"{poset.names[v]}.{k}")
            families[v].append(rng.choice(options))
    res = {}
    for lo, hi in poset.pairs:
        res[(lo, hi)] = tuple(range(len(fibers[hi]))) if lo == hi else tuple(fam[lo] for fam in families[hi])
    return Presheaf(poset, fibers, res)


def random_presheaves(poset: FinitePoset, seed: int, count: int, max_fiber: int = 3) -> list[Presheaf]:
    rng = random.Random(seed)
    return [random_presheaf(poset, rng, max_fiber) for _ in range(count)]
