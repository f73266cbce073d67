"""Hypothesis strategies for finite posets, coclosures and presheaves."""

import random

from hypothesis import strategies as st

from quantopos.bridge import FlatPoset
from quantopos.poset import FinitePoset
from quantopos.sampling import random_presheaf


@st.composite
def posets(draw, max_size=5):
    n = draw(st.integers(1, max_size))
    rel = [[i == j for j in range(n)] for i in range(n)]
    for j in range(n):
        for i in range(j):
            if draw(st.booleans()):
                rel[i][j] = True
    for k in range(n):
        for i in range(n):
            if rel[i][k]:
                for j in range(n):
                    if rel[k][j]:
                        rel[i][j] = True
    return FinitePoset.from_table(rel, [f"v{i}" for i in range(n)])


@st.composite
def rooted_posets(draw, max_size=5):
    """Posets with a least element (object 0), like context posets."""
    p = draw(posets(max_size))
    n = p.size
    rel = [[p.le(i, j) or i == 0 for j in range(n)] for i in range(n)]
    return FinitePoset.from_table(rel, p.names)


@st.composite
def flat_posets(draw, max_size=5):
    """A rooted poset with a coclosure: the largest chosen fixpoint below each object."""
    p = draw(rooted_posets(max_size))
    n = p.size
    for _ in range(20):
        fixed = {0} | {v for v in range(1, n) if draw(st.booleans())}
        flat = []
        for v in range(n):
            below = [w for w in fixed if p.le(w, v)]
            tops = [w for w in below if all(p.le(u, w) for u in below)]
            if len(tops) != 1:
                break
            flat.append(tops[0])
        else:
            fp = FlatPoset(p, tuple(flat))
            if not fp.invariant_violations():
                return fp
    return FlatPoset(p, tuple(range(n)))


@st.composite
def presheaves(draw, poset, max_fiber=2):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_presheaf(poset, random.Random(seed), max_fiber)


@st.composite
def poset_and_presheaf(draw, max_size=4, max_fiber=2):
    p = draw(posets(max_size))
    return p, draw(presheaves(p, max_fiber))
