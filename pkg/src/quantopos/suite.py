"""The full property suite over one scenario."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Callable

from .bridge import ContextPoset, build_context_poset, galois_report, k_invariance_report
from .classical import context_name, faithfulness_report
from .geometric import (
    adjunction_report,
    direct_image,
    factorization_report,
    unit_naturality_report,
    varpi_report,
)
from .matrix import tolerance
from .poset import FinitePoset
from .presheaf import HOM_LIMIT, Presheaf, empty_presheaf, hom_enumerate, one_down, terminal
from .report import CheckReport
from .sampling import random_presheaves
from .scenario import Scenario, presheaf_from_json
from .sheaf import sheaf_suite, standard_samples
from .topology import coarsening_report, comonad_report, topology_axiom_report

#: Sample counts for the pairwise checks; kept small so a full run stays quick.
PAIR_SOURCES = 10
PAIR_TARGETS = 10
MAP_SAMPLES = 6
MAX_WITNESSES = 50


def plain(x: Any) -> Any:
    """JSON-ready copy: sets become sorted lists, tuples become lists."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (set, frozenset)):
        return sorted(plain(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    return x


@dataclass
class SuiteEntry:
    report: CheckReport
    seconds: float = 0.0

    @property
    def name(self) -> str:
        return self.report.name

    @property
    def status(self) -> str:
        return "pass" if self.report.passed else "fail"

    def to_dict(self, timings: bool = False) -> dict:
        d = self.report.to_dict()
        d["info"] = plain(d["info"])
        if len(d["witnesses"]) > MAX_WITNESSES:
            d["witness_count"] = len(d["witnesses"])
            d["witnesses"] = d["witnesses"][:MAX_WITNESSES]
        if timings:
            d["seconds"] = round(self.seconds, 4)
        return d


@dataclass
class SuiteReport:
    scenario: str
    seed: int
    entries: list[SuiteEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.report.passed for e in self.entries)

    def entry(self, name: str) -> SuiteEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "status": "pass" if self.passed else "fail",
            "checks": [e.to_dict(timings) for e in self.entries],
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def summary_lines(self) -> list[str]:
        out = []
        for e in self.entries:
            extra = f" ({len(e.report.witnesses)} counterexamples)" if not e.report.passed else ""
            out.append(f"{e.status.upper():4} {e.name}{extra}")
        return out


def _faithfulness(sc: Scenario) -> CheckReport:
    rep = CheckReport("faithfulness")
    base = faithfulness_report(sc.observables, 1.0)
    for a, b in base.upsilon_violations:
        rep.fail("observables are distinct", left=a, right=b)
    rep.law("observables are distinct")
    for a, b in base.unitary_violations:
        rep.fail("exponentials are distinct", left=a, right=b)
    rep.law("exponentials are distinct")
    info = {}
    for k in [1.0] + list(sc.k_values):
        r = faithfulness_report(sc.observables, k)
        info[repr(k)] = {
            "collisions": sorted(r.collisions),
            "distinct_exponentials": not r.unitary_violations,
        }
    rep.info = {"by_k": info}
    return rep


def _poset_info(cp: ContextPoset) -> CheckReport:
    rep = CheckReport("poset build")
    for problem in cp.check_invariants():
        rep.fail("context poset invariants", problem)
    rep.law("context poset invariants")
    names = cp.names
    rep.info = {
        "contexts": [{"name": n, "dimension": cp.algebras[v].dimension, "psi": sorted(cp.psi_table[v]),
                      "flat": names[cp.flat[v]]} for v, n in enumerate(names)],
        "order": [[names[lo], names[hi]] for lo, hi in cp.poset.cover_pairs],
        "classical": [context_name(c) for c in cp.classical.objects],
        "phi": {context_name(c): names[cp.phi_table[i]] for i, c in enumerate(cp.classical.objects)},
    }
    return rep


def basic_samples(poset: FinitePoset, seed: int, randoms: int, fixtures=()) -> list[Presheaf]:
    out = list(fixtures) + [terminal(poset), empty_presheaf(poset)]
    out += [one_down(poset, v) for v in range(poset.size)]
    out += random_presheaves(poset, seed, randoms)
    return out


def sample_maps(samples, count: int) -> list:
    """A few natural transformations between consecutive samples (deterministic)."""
    out = []
    for a in samples:
        for b in samples:
            if len(out) >= count:
                return out
            hs = hom_enumerate(a, b, HOM_LIMIT)
            if hs and a is not b:
                out.append(hs[-1])
    return out


def scenario_presheaves(sc: Scenario, cp: ContextPoset) -> tuple[list[Presheaf], list[Presheaf]]:
    """Fixture presheaves declared in the scenario, split into (contexts, classical)."""
    on_v, on_c = [], []
    for i, item in enumerate(sc.presheaves):
        where = item.get("on", "contexts") if isinstance(item, dict) else None
        if where == "contexts":
            on_v.append(presheaf_from_json(item, cp.poset))
        elif where == "classical":
            on_c.append(presheaf_from_json(item, cp.classical_poset))
        else:
            from .errors import ParseError

            raise ParseError(f"presheaves[{i}].on: expected 'contexts' or 'classical'")
    return on_v, on_c


def context_poset_for(sc: Scenario) -> ContextPoset:
    return build_context_poset(sc.observables, sc.extra_contexts)


def run_suite(sc: Scenario, seed: int | None = None, cp: ContextPoset | None = None,
              randoms: int = 40) -> SuiteReport:
    seed = sc.seed if seed is None else seed
    name = sc.path.rsplit("/", 1)[-1] if sc.path else "scenario"
    out = SuiteReport(name, seed)

    def step(fn: Callable[[], CheckReport]):
        t0 = time.perf_counter()
        rep = fn()
        out.entries.append(SuiteEntry(rep, time.perf_counter() - t0))
        return rep

    with tolerance(sc.tolerance):
        step(lambda: _faithfulness(sc))
        if cp is None:
            cp = context_poset_for(sc)
        step(lambda: _poset_info(cp))
        step(lambda: galois_report(sc.observables, cp))
        step(lambda: k_invariance_report(sc.observables, sc.k_values))

        fix_v, fix_c = scenario_presheaves(sc, cp)
        phi_m = cp.phi_map()
        fix_v = fix_v + [direct_image(phi_m, p) for p in fix_c]
        v_samples = standard_samples(cp, seed, randoms, fix_v)
        c_samples = basic_samples(cp.classical_poset, seed + 1, 12, fix_c)

        def topo():
            rep = topology_axiom_report(cp, samples=v_samples[:6])
            rep.merge(coarsening_report(cp, cp.proper(), cp.classical), "coarsening: ")
            return rep

        step(topo)
        step(lambda: comonad_report(cp, cp.fixpoints))

        onto, incl = cp.sharp_map()
        a_samples = basic_samples(onto.target, seed + 2, 8)
        targets_v = v_samples[:PAIR_TARGETS]
        sources_c = c_samples[:PAIR_SOURCES]
        for f, sources, targets in (
            (phi_m, sources_c, targets_v),
            (onto, sources_c, a_samples[:PAIR_TARGETS]),
            (incl, a_samples[:PAIR_SOURCES], sources_c),
        ):
            def adj(f=f, sources=sources, targets=targets):
                rep = adjunction_report(f, sources, targets)
                rep.merge(unit_naturality_report(f, sample_maps(targets, MAP_SAMPLES),
                                                 sample_maps(sources, MAP_SAMPLES)))
                counts = rep.info.pop("counts")
                rep.info["pairs"] = len(counts)
                return rep

            step(adj)

        def fact():
            phi_a = phi_m.compose(incl)
            rep = factorization_report(phi_m, phi_a, onto, c_samples, v_samples[:PAIR_TARGETS])
            rep.merge(varpi_report(phi_m, cp.psi_map(), c_samples, sample_maps(c_samples, MAP_SAMPLES)))
            rep.info["proper_category"] = [context_name(c) for c in cp.proper().objects]
            return rep

        step(fact)
        step(lambda: sheaf_suite(cp, v_samples))
    return out
