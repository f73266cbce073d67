"""Independent brute-force oracles used by the tests.

None of these share code with the package's search routines: they enumerate
every candidate directly and filter.
"""

from __future__ import annotations

import itertools

import numpy as np


def all_functions(n_from: int, n_to: int):
    return itertools.product(range(n_to), repeat=n_from)


def natural(p, q, comps) -> bool:
    for lo, hi in p.poset.pairs:
        rp, rq = p.res[(lo, hi)], q.res[(lo, hi)]
        for i in range(len(p.fibers[hi])):
            if comps[lo][rp[i]] != rq[comps[hi][i]]:
                return False
    return True


def brute_homs(p, q) -> set:
    """Every natural transformation ``p -> q`` as a tuple of component tuples."""
    n = p.poset.size
    per = [list(all_functions(len(p.fibers[v]), len(q.fibers[v]))) for v in range(n)]
    return {tuple(c) for c in itertools.product(*per) if natural(p, q, c)}


def brute_downsets(poset) -> list[int]:
    n = poset.size
    out = []
    for mask in range(1 << n):
        if all(not (mask >> b & 1) or all(mask >> a & 1 for a in range(n) if poset.le(a, b)) for b in range(n)):
            out.append(mask)
    return out


def brute_subobjects(p) -> int:
    """Count families of subsets closed under restriction."""
    n = p.poset.size
    choices = [list(itertools.product((0, 1), repeat=len(p.fibers[v]))) for v in range(n)]
    count = 0
    for pick in itertools.product(*choices):
        ok = all(
            not pick[hi][i] or pick[lo][p.res[(lo, hi)][i]]
            for lo, hi in p.poset.pairs for i in range(len(p.fibers[hi]))
        )
        count += ok
    return count


def joint_eigen_commutant_dim(diagonals: list[np.ndarray], digits: int = 8) -> int:
    """Commutant dimension of simultaneously diagonal matrices: the sum of squared class sizes."""
    n = len(diagonals[0]) if diagonals else 0
    keys = {}
    for i in range(n):
        k = tuple((round(d[i].real, digits), round(d[i].imag, digits)) for d in diagonals)
        keys[k] = keys.get(k, 0) + 1
    if not diagonals:
        return n * n
    return sum(m * m for m in keys.values())


def joint_eigen_classes(diagonals: list[np.ndarray], digits: int = 8) -> int:
    n = len(diagonals[0])
    return len({tuple((round(d[i].real, digits), round(d[i].imag, digits)) for d in diagonals) for i in range(n)})


def brute_direct_image_sizes(f, p) -> list[int]:
    """Fiber sizes of the direct image: compatible families over ``{c : f(c) <= v}``."""
    src, tgt = f.source, f.target
    sizes = []
    for v in range(tgt.size):
        members = [c for c in range(src.size) if tgt.le(f(c), v)]
        count = 0
        for pick in itertools.product(*(range(len(p.fibers[c])) for c in members)):
            val = dict(zip(members, pick))
            if all(p.res[(a, b)][val[b]] == val[a] for a in members for b in members if src.le(a, b)):
                count += 1
        sizes.append(count)
    return sizes


def brute_shriek_sizes(f, p) -> list[int]:
    """Fiber sizes of the left adjoint: pairs ``(c, x)`` with ``v <= f(c)`` modulo restriction."""
    src, tgt = f.source, f.target
    sizes = []
    for v in range(tgt.size):
        elems = [(c, i) for c in range(src.size) if tgt.le(v, f(c)) for i in range(len(p.fibers[c]))]
        classes = [{e} for e in elems]
        changed = True
        while changed:
            changed = False
            for a in range(len(classes)):
                for b in range(a + 1, len(classes)):
                    linked = any(
                        src.le(c1, c2) and p.res[(c1, c2)][i2] == i1 or src.le(c2, c1) and p.res[(c2, c1)][i1] == i2
                        for c1, i1 in classes[a] for c2, i2 in classes[b]
                    )
                    if linked:
                        classes[a] |= classes.pop(b)
                        changed = True
                        break
                if changed:
                    break
        sizes.append(len(classes))
    return sizes
