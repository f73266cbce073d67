"""Command line entry point."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import pickle
import sys
from pathlib import Path

from .bridge import ContextPoset
from .errors import InputError, QuantoposError
from .export import ARTIFACTS, FORMATS, export_artifact, topology_structured
from .matrix import tolerance
from .scenario import Scenario, load_presheaf, load_scenario, presheaf_to_json
from .sheaf import is_sheaf, standard_samples
from .suite import context_poset_for, run_suite
from .topology import sheafify, topology_axiom_report

CACHE_ENV = "QUANTOPOS_CACHE"
CACHE_VERSION = "1"


def _common(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    parser.add_argument("--tolerance", type=float, default=s, help="base tolerance (default: scenario value)")
    parser.add_argument("--seed", type=int, default=s, help="sampling seed (default: scenario value)")
    parser.add_argument("--cache-dir", default=s, help=f"reuse built context posets (also ${CACHE_ENV})")
    parser.add_argument("--timings", action="store_true", default=s, help="include wall time in reports")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quantopos", description="Contexts, topologies and sheaves of a quantization.")
    _common(ap)
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _common(p)
        p.add_argument("scenario", help="scenario JSON file")
        return p

    p = cmd("contexts", "list the context poset")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p = cmd("topology", "show J, j and the fixed sieves, and check the axioms")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p = cmd("sheafify", "sheafify a presheaf on the context poset")
    p.add_argument("presheaf", help="presheaf JSON file")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    p = cmd("check", "run the full property suite")
    p.add_argument("-o", "--output", help="write the report here as well as stdout")
    p = cmd("export", "export an artifact")
    p.add_argument("artifact", nargs="?", default=None, help="one of: " + ", ".join(ARTIFACTS))
    p.add_argument("--format", default="structured", help="one of: " + ", ".join(FORMATS))
    p.add_argument("--presheaf", help="presheaf JSON file (for the presheaf artifact)")
    p.add_argument("-o", "--output", help="write here instead of stdout")
    return ap


def _cache_path(cache_dir: str, sc: Scenario) -> Path:
    key = hashlib.sha256(f"{CACHE_VERSION}:{sc.digest}:{sc.tolerance!r}".encode()).hexdigest()
    return Path(cache_dir) / f"poset-{key[:32]}.pickle"


def context_poset(sc: Scenario, cache_dir: str | None) -> ContextPoset:
    """Build the context poset, going through the on-disk cache when one is configured."""
    if not cache_dir:
        return context_poset_for(sc)
    path = _cache_path(cache_dir, sc)
    if path.exists():
        try:
            with path.open("rb") as fh:
                cp = pickle.load(fh)
            if isinstance(cp, ContextPoset):
                return cp
        except (OSError, pickle.UnpicklingError, EOFError, AttributeError):
            pass
    cp = context_poset_for(sc)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with tmp.open("wb") as fh:
            pickle.dump(cp, fh)
        tmp.replace(path)
    except OSError as exc:
        print(f"warning: cache not written ({exc})", file=sys.stderr)
    return cp


def _emit(text: str, output: str | None, also_stdout: bool = False) -> None:
    if output:
        Path(output).write_text(text)
    if also_stdout or not output:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _contexts(cp: ContextPoset, as_json: bool) -> int:
    if as_json:
        from .export import poset_structured

        sys.stdout.write(_dump(poset_structured(cp)))
        return 0
    names = cp.names
    width = max(len(n) for n in names)
    print(f"{'context':<{width}}  dim  flat  classical part")
    for v, n in enumerate(names):
        part = "{" + ",".join(sorted(cp.psi_table[v])) + "}"
        print(f"{n:<{width}}  {cp.algebras[v].dimension:>3}  {names[cp.flat[v]]:<{max(4, width)}}  {part}")
    print("order: " + ", ".join(f"{names[a]} < {names[b]}" for a, b in cp.poset.cover_pairs))
    return 0


def _topology(cp: ContextPoset, as_json: bool, seed: int) -> int:
    rep = topology_axiom_report(cp, samples=standard_samples(cp, seed)[:6])
    data = topology_structured(cp)
    if as_json:
        data["axioms"] = rep.to_dict()
        sys.stdout.write(_dump(data))
    else:
        for v in cp.names:
            cover = "; ".join("{" + ",".join(s) + "}" for s in data["J"][v])
            print(f"{v}: J = {cover}  ({len(data['omega_j'][v])} fixed sieves)")
        print(("PASS" if rep.passed else "FAIL") + f" topology axioms ({len(rep.laws)} laws)")
        for w in rep.witnesses[:20]:
            print(f"  {w}")
    return 0 if rep.passed else 1


def _sheafify(cp: ContextPoset, path: str, output: str | None) -> int:
    q = load_presheaf(path, cp.poset)
    verdict = is_sheaf(q, cp)
    out = {
        "input": {
            "zeta_iso": verdict.zeta_iso,
            "extension": verdict.j_sheaf_extension,
            "direct_image": verdict.external_phi_star,
            "is_sheaf": verdict.is_sheaf,
        },
        "sheafified": presheaf_to_json(sheafify(q, cp)),
    }
    _emit(_dump(out), output)
    return 0


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    sc = load_scenario(args.scenario)
    tol = getattr(args, "tolerance", None)
    if tol is not None:
        if not tol > 0:
            raise InputError("--tolerance must be positive")
        sc.tolerance = tol
    seed = getattr(args, "seed", None)
    if seed is not None:
        sc.seed = seed
    timings = getattr(args, "timings", False)
    cache_dir = getattr(args, "cache_dir", None) or os.environ.get(CACHE_ENV) or None

    with tolerance(sc.tolerance):
        cp = context_poset(sc, cache_dir)
        if args.command == "contexts":
            return _contexts(cp, args.json)
        if args.command == "topology":
            return _topology(cp, args.json, sc.seed)
        if args.command == "sheafify":
            return _sheafify(cp, args.presheaf, args.output)
        if args.command == "check":
            report = run_suite(sc, cp=cp)
            _emit(report.to_json(timings), args.output, also_stdout=True)
            for line in report.summary_lines():
                print(line, file=sys.stderr)
            return 0 if report.passed else 1
        # export
        kwargs = {"poset": cp}
        if args.artifact == "presheaf":
            if not args.presheaf:
                raise InputError("the presheaf artifact needs --presheaf FILE")
            kwargs["presheaf"] = load_presheaf(args.presheaf, cp.poset)
        if args.artifact == "report":
            kwargs["report"] = run_suite(sc, cp=cp)
        data = export_artifact(args.artifact, args.format, timings=timings, **kwargs)
        _emit(_dump(data), args.output)
        return 0


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuantoposError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
