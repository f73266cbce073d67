"""Compare the compiled and pure-Python search kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Workloads are taken from the F2 fixture: hom searches behind the exponential
checks and subobject enumeration of a product presheaf.
"""

import argparse
import statistics
import sys
import timeit
from pathlib import Path

from quantopos import _kernels_py
from quantopos.presheaf import _element_order, _hom_problem
from quantopos.sampling import random_presheaves
from quantopos.scenario import load_scenario
from quantopos.suite import context_poset_for
from quantopos.topos import product

try:
    from quantopos import _ckernels
except ImportError:
    _ckernels = None

ROOT = Path(__file__).resolve().parent.parent


def workloads():
    cp = context_poset_for(load_scenario(ROOT / "fixtures" / "f2.json"))
    samples = random_presheaves(cp.poset, 7, 12, max_fiber=3)
    big = max(samples, key=lambda p: sum(p.sizes))
    _, domains, checks = _hom_problem(product(samples[4], samples[11]).apex, samples[9])
    _, doms2, checks2 = _hom_problem(big, big)
    elems, below = _element_order(product(big, big).apex)
    return {
        "hom search, product into sample": ("enumerate_assignments", (domains, checks)),
        "hom search, endomorphisms": ("enumerate_assignments", (doms2, checks2)),
        "subobjects of a square": ("enumerate_downsets", (list(range(len(elems))), below)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'workload':36} {'results':>8} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, (fn, fargs) in workloads().items():
        py, cy = getattr(_kernels_py, fn), getattr(_ckernels, fn)
        n = len(py(*fargs))
        assert n == len(cy(*fargs))
        t_py = statistics.median(timeit.repeat(lambda: py(*fargs), number=1, repeat=args.repeat)) * 1e3
        t_cy = statistics.median(timeit.repeat(lambda: cy(*fargs), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:36} {n:>8} {t_py:>10.2f} {t_cy:>10.2f} {t_py / t_cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
