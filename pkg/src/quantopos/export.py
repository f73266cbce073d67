"""Artifact exports: structured (canonical JSON) and graph (nodes and edges)."""

from __future__ import annotations

from .bridge import FlatPoset
from .errors import UnknownArtifact
from .presheaf import Presheaf
from .scenario import presheaf_to_json, render_label
from .sheaf import omega_j
from .suite import SuiteReport
from .topology import grothendieck_J, lt_j

ARTIFACTS = ("poset", "topology", "presheaf", "report")
FORMATS = ("structured", "graph")


def poset_structured(fp: FlatPoset) -> dict:
    ps = fp.poset
    out = {
        "objects": list(ps.names),
        "order": [[ps.names[lo], ps.names[hi]] for lo, hi in ps.cover_pairs],
        "flat": {ps.names[v]: ps.names[fp.flat[v]] for v in range(ps.size)},
    }
    algs = getattr(fp, "algebras", None)
    if algs:
        out["dimensions"] = {ps.names[v]: a.dimension for v, a in enumerate(algs)}
        out["psi"] = {ps.names[v]: sorted(c) for v, c in enumerate(fp.psi_table)}
    return out


def poset_graph(fp: FlatPoset) -> dict:
    ps = fp.poset
    nodes = [{"id": n} for n in ps.names]
    edges = [{"source": ps.names[lo], "target": ps.names[hi], "kind": "order", "style": "solid"}
             for lo, hi in ps.cover_pairs]
    edges += [{"source": ps.names[v], "target": ps.names[fp.flat[v]], "kind": "flat", "style": "dashed"}
              for v in range(ps.size) if fp.flat[v] != v]
    return {"nodes": nodes, "edges": edges}


def _sieve_labels(ps, mask: int) -> list[str]:
    return list(ps.mask_names(mask))


def topology_structured(fp: FlatPoset) -> dict:
    ps = fp.poset
    jt = grothendieck_J(fp)
    j = lt_j(fp)
    oj = omega_j(fp)
    return {
        "J": {ps.names[v]: [_sieve_labels(ps, m) for m in jt.covers(v)] for v in range(ps.size)},
        "j": {ps.names[v]: [{"sieve": _sieve_labels(ps, m), "image": _sieve_labels(ps, j.apply(v, m))}
                            for m in j.omega.fibers[v]]
              for v in range(ps.size)},
        "omega_j": {ps.names[v]: [_sieve_labels(ps, oj.sub.ambient.fibers[v][i]) for i in sorted(oj.sub.subsets[v])]
                    for v in range(ps.size)},
    }


def topology_graph(fp: FlatPoset) -> dict:
    g = poset_graph(fp)
    jt = grothendieck_J(fp)
    for v, node in enumerate(g["nodes"]):
        node["covering_sieves"] = jt.sizes[v]
    return g


def presheaf_graph(p: Presheaf) -> dict:
    ps = p.poset
    nodes = [{"id": f"{ps.names[v]}:{render_label(x)}", "object": ps.names[v], "label": render_label(x)}
             for v in range(ps.size) for x in p.fibers[v]]
    edges = []
    for lo, hi in ps.cover_pairs:
        for i, j in enumerate(p.res[(lo, hi)]):
            edges.append({
                "source": f"{ps.names[hi]}:{render_label(p.fibers[hi][i])}",
                "target": f"{ps.names[lo]}:{render_label(p.fibers[lo][j])}",
                "kind": "restriction",
            })
    return {"nodes": nodes, "edges": edges}


def export_artifact(artifact: str | None, fmt: str = "structured", *, poset: FlatPoset | None = None,
                    presheaf: Presheaf | None = None, report: SuiteReport | None = None,
                    timings: bool = False) -> dict:
    if not artifact:
        raise UnknownArtifact("no artifact selected; choose one of " + ", ".join(ARTIFACTS))
    if artifact not in ARTIFACTS:
        raise UnknownArtifact(f"unknown artifact {artifact!r}; choose one of " + ", ".join(ARTIFACTS))
    if fmt not in FORMATS:
        raise UnknownArtifact(f"unknown format {fmt!r}; choose structured or graph")
    if artifact == "presheaf":
        if presheaf is None:
            raise UnknownArtifact("presheaf export needs a presheaf")
        return presheaf_to_json(presheaf) if fmt == "structured" else presheaf_graph(presheaf)
    if artifact == "report":
        if report is None:
            raise UnknownArtifact("report export needs a suite run")
        if fmt == "graph":
            raise UnknownArtifact("reports have no graph form")
        return report.to_dict(timings)
    if poset is None:
        raise UnknownArtifact(f"{artifact} export needs a context poset")
    if artifact == "poset":
        return poset_structured(poset) if fmt == "structured" else poset_graph(poset)
    return topology_structured(poset) if fmt == "structured" else topology_graph(poset)
