"""The nine acceptance criteria, each at its stated tolerance and time limit."""

import shutil
import subprocess
import sys
import time

import pytest
from conftest import ACCEPTANCE, FIXTURES, ROOT

from quantopos.bridge import galois_report, phi
from quantopos.classical import context_name
from quantopos.geometric import (
    adjoint_transposes,
    direct_image,
    inverse_image,
    shriek,
    unit_eta,
    varpi,
)
from quantopos.matrix import scalar_algebra, tolerance
from quantopos.presheaf import hom_count, hom_enumerate, isomorphic
from quantopos.scenario import load_scenario
from quantopos.sheaf import is_sheaf, omega_j, sheaf_suite, standard_samples
from quantopos.suite import basic_samples, context_poset_for, run_suite, scenario_presheaves
from quantopos.topology import grothendieck_J, sheafify, topology_axiom_report

GOLDEN = ROOT / "tests" / "golden" / "f2_report.json"


def record(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((num, bool(ok), detail))
    assert ok, f"criterion {num}: {detail}"


def load(name):
    sc = load_scenario(FIXTURES / f"{name}.json")
    with tolerance(sc.tolerance):
        return sc, context_poset_for(sc)


@pytest.fixture(scope="module")
def f2():
    sc, cp = load("f2")
    on_v, on_c = scenario_presheaves(sc, cp)
    q2, p2 = on_v[0], on_c[0]
    fixtures = [q2, direct_image(cp.phi_map(), p2)]
    samples = standard_samples(cp, sc.seed, 40, fixtures)
    classical = basic_samples(cp.classical_poset, sc.seed + 1, 40, [p2])
    return sc, cp, q2, p2, samples, classical


def test_criterion_1_galois_suite():
    problems, times, laws = [], {}, set()
    for name in ("f1", "f2", "f3", "f4"):
        t0 = time.perf_counter()
        sc, cp = load(name)
        with tolerance(sc.tolerance):
            rep = galois_report(sc.observables, cp)
        times[name] = time.perf_counter() - t0
        laws.add(len(rep.laws))
        if not rep.passed:
            problems.append(f"{name}: {rep.witnesses[0]}")
        if times[name] >= 1.0:
            problems.append(f"{name}: {times[name]:.2f}s")
    slowest = max(times.values())
    record(1, not problems, "; ".join(problems) or f"{max(laws)} laws on F1-F4, slowest {slowest:.3f}s")


def test_criterion_2_proper_category():
    got = {}
    for name in ("f3", "f4"):
        _, cp = load(name)
        got[name] = [context_name(c) for c in cp.proper().objects]
    classical_f3 = [context_name(c) for c in load("f3")[1].classical.objects]
    ok = got["f4"] == ["{}", "{z,zp}"] and got["f3"] == classical_f3 == ["{}", "{x}", "{z}"]
    record(2, ok, f"F4 -> {got['f4']}, F3 -> {got['f3']}")


def test_criterion_3_k_invariance():
    from quantopos.bridge import k_invariance_report

    sc, _ = load("f1")
    obs = sc.observables
    equal = k_invariance_report(obs, [0.5, -1.0])
    eq_ok = equal.passed and all(e["status"] == "equal" for e in equal.info["entries"])
    deg = k_invariance_report(obs, [2.0])
    z = [e for e in deg.info["entries"] if e["context"] == "{z}"]
    deg_ok = deg.passed and z and z[0]["status"] == "degenerate-spectrum: unequal" and z[0]["collisions"] == ["z"]
    scalar_ok = phi(["z"], obs, 2.0).span_equal(scalar_algebra(2))
    record(3, eq_ok and deg_ok and scalar_ok,
           f"k=0.5,-1 equal: {eq_ok}; k=2 flagged: {bool(deg_ok)}; phi_2({{z}}) = CI: {scalar_ok}")


def test_criterion_4_topology_tables(f2):
    _, cp, q2, _, samples, _ = f2
    t0 = time.perf_counter()
    sizes = grothendieck_J(cp).sizes
    oj = omega_j(cp).sizes
    rep = topology_axiom_report(cp, samples=[q2] + samples[2:6])
    elapsed = time.perf_counter() - t0
    round_trip = "round trip j -> closure -> J -> j" in rep.laws and rep.passed
    ok = sizes == (1, 1, 2) and oj == (2, 3, 2) and rep.passed and round_trip and elapsed < 1.0
    record(4, ok, f"|J| = {sizes}, |Omega_j| = {oj}, {len(rep.laws)} laws, "
                  f"{len(rep.witnesses)} counterexamples, {elapsed:.3f}s")


def test_criterion_5_sheaf_criteria_agree(f2):
    _, cp, _, _, samples, _ = f2
    t0 = time.perf_counter()
    disagree, unsheafy = [], []
    for k, f in enumerate(samples):
        v = is_sheaf(f, cp, strict=False)
        if not v.agree:
            disagree.append(k)
        s = is_sheaf(sheafify(f, cp), cp, strict=False)
        if not (s.zeta_iso and s.j_sheaf_extension and s.external_phi_star):
            unsheafy.append(k)
    elapsed = time.perf_counter() - t0
    ok = len(samples) >= 50 and not disagree and not unsheafy and elapsed < 30
    record(5, ok, f"{len(samples)} samples, disagreements {disagree}, bad sheafifications {unsheafy}, "
                  f"{elapsed:.2f}s")


def test_criterion_6_adjunction_counts(f2):
    _, cp, q2, p2, samples, classical = f2
    f = cp.phi_map()
    fp = direct_image(f, p2)
    left = hom_enumerate(inverse_image(f, q2), p2)
    right = hom_enumerate(q2, fp)
    up, down = adjoint_transposes(f, q2, p2, fp)
    inverse_ok = (all(down(up(s)) == s for s in left) and all(up(down(t)) == t for t in right)
                  and {up(s) for s in left} == set(right))
    shriek_sizes = shriek(f, p2).sizes
    bad = []
    for i, p in enumerate(classical):
        sp = shriek(f, p)
        for j, q in enumerate(samples):
            if hom_count(sp, q) != hom_count(p, inverse_image(f, q)):
                bad.append((i, j))
    ok = len(left) == len(right) == 2 and inverse_ok and shriek_sizes == (1, 2, 0) and not bad
    record(6, ok, f"|Hom| = {len(left)}/{len(right)}, transposes inverse: {inverse_ok}, "
                  f"shriek P2 = {shriek_sizes}, {len(classical) * len(samples)} pairs, {len(bad)} mismatches")


def test_criterion_7_comparison_isos(f2):
    _, cp, _, _, samples, classical = f2
    f = cp.phi_map()
    onto, incl = cp.sharp_map()
    phi_a = f.compose(incl)
    psi = cp.psi_map()
    problems = []
    for k, p in enumerate(classical):
        fp = direct_image(f, p)
        fwd, back = varpi(f, psi, p, fp)
        if not (fwd.is_natural() and fwd.is_iso() and back == fwd.inverse()):
            problems.append(f"varpi at sample {k}")
        if not unit_eta(f, fp).is_iso():
            problems.append(f"eta at sample {k}")
        if not isomorphic(direct_image(phi_a, direct_image(onto, p)), fp):
            problems.append(f"factorized direct image at sample {k}")
    for k, q in enumerate(samples):
        if inverse_image(onto, inverse_image(phi_a, q)) != inverse_image(f, q):
            problems.append(f"inverse image at sample {k}")
    record(7, not problems, "; ".join(problems[:3]) or
           f"{len(classical)} classical and {len(samples)} context samples")


def test_criterion_8_topos_conditions(f2):
    sc, cp, _, _, samples, _ = f2
    t0 = time.perf_counter()
    rep = sheaf_suite(cp, samples)
    full = run_suite(sc)
    elapsed = time.perf_counter() - t0
    needed = {"products of sheaves are sheaves", "equalizers of sheaves are sheaves",
              "pullbacks of sheaves are sheaves", "exponential into a sheaf is a sheaf",
              "the classifier is a sheaf", "closed subobjects are the subsheaves",
              "closed subobjects biject with j-fixed maps", "j-fixed maps are the maps into the classifier"}
    missing = needed - set(rep.laws)
    ok = rep.passed and full.passed and not missing and elapsed < 60
    record(8, ok, f"{len(rep.laws)} laws, {len(rep.witnesses)} counterexamples, missing {sorted(missing)}, "
                  f"suite {'pass' if full.passed else 'fail'}, {elapsed:.2f}s")


def test_criterion_9_end_to_end():
    exe = shutil.which("quantopos")
    cmd = [exe] if exe else [sys.executable, "-m", "quantopos.cli"]
    proc = subprocess.run(cmd + ["check", "fixtures/f2.json"], cwd=ROOT, capture_output=True)
    same = proc.stdout == GOLDEN.read_bytes()
    record(9, proc.returncode == 0 and same, f"exit {proc.returncode}, golden match: {same}")
