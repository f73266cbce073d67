"""Scenario files and presheaf serialization (JSON)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .classical import ObservableSet
from .errors import InputError, NonCommutingGenerators, NonHermitian, ParseError, ShapeMismatch
from .matrix import DEFAULT_TOLERANCE, as_matrix, commutes, tolerance
from .poset import FinitePoset
from .presheaf import Presheaf, validate_presheaf


@dataclass
class Scenario:
    dim: int
    observables: ObservableSet
    extra_contexts: list[tuple[str, list[np.ndarray]]]
    k_values: list[float]
    tolerance: float
    seed: int
    presheaves: list[dict] = field(default_factory=list)
    digest: str = ""
    path: str | None = None


def _complex(x, where: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x):
        return complex(x[0], x[1])
    raise ParseError(f"{where}: expected a number or an [re, im] pair, got {x!r}")


def parse_matrix(raw, dim: int, where: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != dim:
        raise ParseError(f"{where}: expected {dim} rows")
    rows = []
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}[{r}]: expected {dim} entries")
        rows.append([_complex(x, f"{where}[{r}][{c}]") for c, x in enumerate(row)])
    try:
        return as_matrix(rows, dim)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _require(obj: dict, key: str, kind, where: str = ""):
    if key not in obj:
        raise ParseError(f"{where}{key}: missing")
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool) and kind is not bool:
        raise ParseError(f"{where}{key}: expected {getattr(kind, '__name__', kind)}")
    return val


def parse_scenario(data: Any, text: str = "") -> Scenario:
    if not isinstance(data, dict):
        raise ParseError("scenario must be a JSON object")
    known = {"dim", "observables", "extra_contexts", "k_values", "tolerance", "seed", "presheaves", "name"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ParseError(f"unknown keys {unknown}")
    dim = _require(data, "dim", int)
    if dim < 1:
        raise ParseError("dim: must be positive")
    tol = data.get("tolerance", DEFAULT_TOLERANCE)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not tol > 0:
        raise ParseError("tolerance: must be a positive number")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ParseError("seed: must be an integer")
    ks = data.get("k_values", [])
    if not isinstance(ks, list) or not all(isinstance(k, (int, float)) and not isinstance(k, bool) for k in ks):
        raise ParseError("k_values: must be a list of numbers")
    if any(k == 0 for k in ks):
        raise ParseError("k_values: 0 is not allowed")

    obs_raw = _require(data, "observables", list)
    if not obs_raw:
        raise ParseError("observables must be nonempty")
    with tolerance(float(tol)):
        pairs = []
        for i, item in enumerate(obs_raw):
            where = f"observables[{i}]."
            if not isinstance(item, dict):
                raise ParseError(f"observables[{i}]: expected an object")
            label = _require(item, "label", str, where)
            pairs.append((label, parse_matrix(_require(item, "matrix", list, where), dim, where + "matrix")))
        try:
            obs = ObservableSet.from_pairs(pairs)
        except NonHermitian:
            raise
        except InputError as exc:
            raise ParseError(f"observables: {exc}") from None

        extras = []
        names = set()
        for i, item in enumerate(data.get("extra_contexts", [])):
            where = f"extra_contexts[{i}]."
            if not isinstance(item, dict):
                raise ParseError(f"extra_contexts[{i}]: expected an object")
            name = _require(item, "name", str, where)
            if name in names:
                raise ParseError(f"{where}name: duplicate {name!r}")
            names.add(name)
            gens = [parse_matrix(g, dim, f"{where}generators[{j}]")
                    for j, g in enumerate(_require(item, "generators", list, where))]
            family = gens + [g.conj().T for g in gens]
            for a in range(len(family)):
                for b in range(a + 1, len(family)):
                    if not commutes(family[a], family[b]):
                        raise NonCommutingGenerators(f"{where}generators ({name}): generators do not commute")
            extras.append((name, gens))
    pres = data.get("presheaves", [])
    if not isinstance(pres, list):
        raise ParseError("presheaves: expected a list")
    digest = hashlib.sha256(text.encode() if text else json.dumps(data, sort_keys=True).encode()).hexdigest()
    return Scenario(dim, obs, extras, [float(k) for k in ks], float(tol), seed, pres, digest)


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    sc = parse_scenario(data, text)
    sc.path = str(p)
    return sc


# presheaves ------------------------------------------------------------------

def render_label(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return "-"
    if isinstance(x, tuple):
        return "(" + ",".join(render_label(y) for y in x) + ")"
    return str(x)


def presheaf_to_json(p: Presheaf) -> dict:
    ps = p.poset
    fibers = {ps.names[v]: [render_label(x) for x in p.fibers[v]] for v in range(ps.size)}
    rs = []
    for lo, hi in ps.cover_pairs:
        rs.append({
            "from": ps.names[hi],
            "to": ps.names[lo],
            "map": {render_label(x): render_label(p.fibers[lo][j]) for x, j in zip(p.fibers[hi], p.res[(lo, hi)])},
        })
    return {
        "objects": list(ps.names),
        "order": [[ps.names[lo], ps.names[hi]] for lo, hi in ps.cover_pairs],
        "fibers": fibers,
        "restrictions": rs,
    }


def presheaf_from_json(data: Any, poset: FinitePoset | None = None, strict: bool = True) -> Presheaf:
    """Inverse of :func:`presheaf_to_json`; ``poset`` may stand in for ``objects``/``order``."""
    if not isinstance(data, dict):
        raise ParseError("presheaf must be a JSON object")
    if "objects" in data:
        objs = data["objects"]
        order = data.get("order", [])
        if not isinstance(objs, list) or not all(isinstance(o, str) for o in objs):
            raise ParseError("objects: expected a list of names")
        try:
            own = FinitePoset.from_relation(objs, [tuple(pair) for pair in order])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"order: {exc}") from None
        if poset is not None and own != poset:
            raise ShapeMismatch("presheaf objects or order differ from the context poset")
        poset = own
    if poset is None:
        raise ParseError("objects: missing, and no poset was supplied")
    fib_raw = data.get("fibers")
    if not isinstance(fib_raw, dict):
        raise ParseError("fibers: expected an object keyed by object name")
    unknown = set(fib_raw) - set(poset.names)
    if unknown:
        raise ParseError(f"fibers: unknown objects {sorted(unknown)}")
    fibers = []
    for n in poset.names:
        f = fib_raw.get(n, [])
        if not isinstance(f, list) or not all(isinstance(x, str) for x in f) or len(set(f)) != len(f):
            raise ParseError(f"fibers.{n}: expected a list of distinct strings")
        fibers.append(f)
    maps = {}
    for i, r in enumerate(data.get("restrictions", [])):
        try:
            key = (poset.index(r["to"]), poset.index(r["from"]))
            m = r["map"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"restrictions[{i}]: {exc}") from None
        if not isinstance(m, dict):
            raise ParseError(f"restrictions[{i}].map: expected an object")
        maps[key] = m
    try:
        p = Presheaf.from_covers(poset, fibers, maps, strict=strict)
    except KeyError as exc:
        raise ParseError(f"restrictions: no image for {exc}") from None
    except InputError as exc:
        raise ParseError(f"restrictions: {exc}") from None
    if strict:
        bad = validate_presheaf(p)
        if bad is not None:
            raise ParseError(f"not a presheaf: {bad}")
    return p


def load_presheaf(path, poset: FinitePoset | None = None) -> Presheaf:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return presheaf_from_json(data, poset)
