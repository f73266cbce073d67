"""Pure-Python kernels (reference implementation and fallback).

``enumerate_assignments`` is a small constraint solver: slot ``s`` takes a
value ``y`` in ``range(domains[s])`` and every check ``(t, table)`` in
``checks[s]`` (with ``t < s``) demands ``table[y] == value[t]``.  Natural
transformations between finite presheaves are exactly such assignments.
"""

from __future__ import annotations

from typing import Sequence


def enumerate_assignments(
    domains: Sequence[int], checks: Sequence[Sequence[tuple[int, Sequence[int]]]]
) -> list[tuple[int, ...]]:
    n = len(domains)
    plans = []
    for s in range(n):
        cs = list(checks[s])
        if cs:
            t0, table0 = cs[0]
            pre: dict[int, list[int]] = {}
            for y in range(domains[s]):
                pre.setdefault(table0[y], []).append(y)
            plans.append((t0, pre, cs[1:]))
        else:
            plans.append((None, list(range(domains[s])), ()))

    out: list[tuple[int, ...]] = []
    vals = [0] * n

    def candidates(s):
        t0, pre, rest = plans[s]
        base = pre if t0 is None else pre.get(vals[t0], ())
        if not rest:
            return base
        return [y for y in base if all(table[y] == vals[t] for t, table in rest)]

    if n == 0:
        return [()]
    stack = [iter(candidates(0))]
    while stack:
        s = len(stack) - 1
        y = next(stack[-1], None)
        if y is None:
            stack.pop()
            continue
        vals[s] = y
        if s + 1 == n:
            out.append(tuple(vals))
        else:
            stack.append(iter(candidates(s + 1)))
    return out


def enumerate_downsets(order: Sequence[int], strict_below: Sequence[int]) -> list[int]:
    """All downsets of a poset given in a linear extension.

    ``order`` lists the elements bottom-first; ``strict_below[i]`` is the mask of
    elements strictly below ``order[i]``.  Each downset is produced once.
    """
    out: list[int] = []
    n = len(order)

    def walk(i: int, mask: int) -> None:
        if i == n:
            out.append(mask)
            return
        walk(i + 1, mask)
        if strict_below[i] & ~mask == 0:
            walk(i + 1, mask | (1 << order[i]))

    walk(0, 0)
    return out
