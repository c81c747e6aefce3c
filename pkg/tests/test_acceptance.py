"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s``.  Every numeric target is
recomputed here from an in-repo oracle (spectral decomposition, closed-form
Fourier decay, Crank-Nicolson, exact coupling); nothing is asserted from
memory.  The full suite takes roughly 20-25 minutes on one core.
"""

import json
import os
import time

import numpy as np

from exclusim.cli import main
from exclusim.conductance import ConductanceField, assign
from exclusim.config import parse_config
from exclusim.experiments import (
    duality_experiment,
    hom_discrepancy,
    homogenization_experiment,
    hydro_experiment,
)
from exclusim.graphs import TestFunction, build_torus_1d


def _line(num: int, ok: bool, detail: str) -> bool:
    print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    return ok


def test_criterion_1_kernel_symmetry():
    from exclusim.kernel import transition_matrix

    t0 = time.time()
    fields = [
        ConductanceField.constant(1.0),
        ConductanceField.periodic([1.0, 2.0]),
        ConductanceField.iid_uniform(1.0, 2.0, seed=0),
    ]
    worst = 0.0
    for n in (16, 64, 256):
        for field in fields:
            g = assign(field, build_torus_1d(n))
            for t in (0.01, 0.05, 0.2):
                worst = max(worst, transition_matrix(g, t).max_asymmetry())
    ok = worst <= 1e-9
    assert _line(1, ok, f"max kernel asymmetry {worst:.3e} <= 1e-9 "
                        f"({time.time() - t0:.0f}s)")


def test_criterion_2_conservation_and_duality():
    from exclusim.harris import evolve_exclusion, evolve_walker, sample_clocks

    t0 = time.time()
    n = 64
    g = assign(ConductanceField.constant(1.0), build_torus_1d(n))
    rng = np.random.default_rng(0)
    conserved = coupled = True
    for s in range(1000):
        log = sample_clocks(g, 0.05, seed=s)
        eta0 = (rng.random(n) < 0.5).astype(np.uint8)
        x0 = s % n
        single = np.zeros(n, dtype=np.uint8)
        single[x0] = 1
        for t in (0.02, 0.05):
            eta = evolve_exclusion(eta0, log, t)
            if int(eta.sum()) != int(eta0.sum()):
                conserved = False
            walked = evolve_walker(x0, log, t)
            moved = evolve_exclusion(single, log, t)
            if not (moved[walked] == 1 and moved.sum() == 1):
                coupled = False
    ok = conserved and coupled
    assert _line(2, ok, f"1000 logs on n=64: conservation exact={conserved}, "
                        f"walker coupling exact={coupled} ({time.time() - t0:.0f}s)")


def test_criterion_3_duhamel_identity():
    from exclusim.harris import sample_clocks, sample_product_measure
    from exclusim.kernel import duhamel_residual

    t0 = time.time()
    n, t, tol = 8, 0.05, 1e-5
    g = assign(ConductanceField.constant(1.0), build_torus_1d(n))
    worst = 0.0
    for s in range(100):
        eta0 = sample_product_measure(g, 0.4, seed=1000 + s)
        log = sample_clocks(g, t, seed=2000 + s)
        worst = max(worst, duhamel_residual(g, eta0, log, t, tol=tol))
    ok = worst <= 10 * tol
    assert _line(3, ok, f"max residual {worst:.3e} <= {10 * tol:.0e} over "
                        f"100 pairs ({time.time() - t0:.0f}s)")


def test_criterion_4_duality_bound():
    t0 = time.time()
    cfg = parse_config(
        "graph.n = [32, 64, 128]\n"
        "phi = cosine:1\n"
        "rho0 = constant:0.5\n"
        "t = 0.05\n"
        "replicas = 2000\n"
        "env_seeds = [0]\n",
        base_seed=0,
    )
    report = duality_experiment(cfg)
    detail = "; ".join(
        f"n={r.n}: est={r.stat:.3e} bound={r.bound:.3e} se={r.se:.1e}"
        for r in report.records)
    ratios = ", ".join(f"{r:.2f}" for r in report.extras["doubling_ratios"])
    assert _line(4, report.passed,
                 f"{detail}; doubling ratios [{ratios}] in [1.5, 3] "
                 f"({time.time() - t0:.0f}s)")


def test_criterion_5_homogenization_deterministic():
    t0 = time.time()
    phi = TestFunction.cosine_mode(1)
    t = 0.05
    discs, discs_alt = [], []
    for n in (64, 128, 256):
        g = assign(ConductanceField.periodic([1.0, 2.0]), build_torus_1d(n))
        discs.append(hom_discrepancy(g, phi, t, 4.0 / 3.0))
        discs_alt.append(hom_discrepancy(g, phi, t, 1.5))
    monotone = discs[0] > discs[1] > discs[2]
    beats = discs[-1] < discs_alt[-1]
    ok = monotone and beats
    assert _line(5, ok,
                 f"D=4/3 discrepancies {[f'{d:.2e}' for d in discs]} monotone={monotone}; "
                 f"at n=256 D=4/3 gives {discs[-1]:.2e} < D=3/2 gives "
                 f"{discs_alt[-1]:.2e} ({time.time() - t0:.0f}s)")


def test_criterion_6_quenched_homogenization():
    t0 = time.time()
    cfg = parse_config(
        "graph.n = [128, 256, 512]\n"
        "field.kind = iid_uniform\n"
        "field.lo = 1.0\n"
        "field.hi = 2.0\n"
        "env_seeds = [0, 1, 2, 3, 4]\n"
        "phi = cosine:1\n"
        "t = 0.05\n"
        "max_discrepancy = 0.02\n",
        base_seed=0,
    )
    report = homogenization_experiment(cfg)
    by_seed: dict[int, list[float]] = {}
    for r in report.records:
        by_seed.setdefault(r.env_seed, []).append(r.stat)
    small = all(v[-1] <= 0.02 for v in by_seed.values())
    mono_seeds = [s for s, v in by_seed.items() if all(b < a for a, b in zip(v, v[1:]))]
    assert _line(6, report.passed,
                 f"final disc <= 0.02 for all seeds: {small} "
                 f"(max {max(v[-1] for v in by_seed.values()):.2e}); "
                 f"per-seed decreasing for {len(mono_seeds)}/5 seeds {sorted(mono_seeds)} "
                 f"({time.time() - t0:.0f}s)")


HYDRO_BODY = """
graph.n = [128, 256, 512]
field.kind = {kind}
{field_lines}
phi = cosine:1
rho0 = cosine:0.5,0.5,1
t = 0.05
delta = 0.05
replicas = 200
env_seeds = [0]
diffusivity = {diffusivity}
"""


def test_criterion_7_hydrodynamic_limit():
    t0 = time.time()
    cfg = parse_config(
        HYDRO_BODY.format(kind="constant", field_lines="field.value = 1.0",
                          diffusivity="auto"),
        base_seed=0,
    )
    report = hydro_experiment(cfg)
    probs = [r.stat for r in report.records]
    cross = max(c["abs_err"] for c in report.extras["pde_cross_checks"])
    ok = report.passed and cross <= 1e-4
    assert _line(7, ok,
                 f"exceedance over n=128,256,512: {[f'{p:.3f}' for p in probs]} "
                 f"(non-increasing, final <= 0.05: {report.passed}); "
                 f"CN vs closed-form target err {cross:.1e} <= 1e-4 "
                 f"({time.time() - t0:.0f}s)")


def test_criterion_8_negative_control_exit_code(tmp_path):
    t0 = time.time()
    cfg_path = tmp_path / "neg.cfg"
    cfg_path.write_text(
        HYDRO_BODY.format(kind="periodic", field_lines="field.pattern = [1, 4]",
                          diffusivity="arithmetic"))
    out = str(tmp_path / "out")
    rc = main(["hydro", "--config", str(cfg_path), "--out", out, "--seed", "0"])
    report = json.load(open(os.path.join(out, "report.json")))
    probs = [r["stat"] for r in report["records"]]
    ok = rc == 2
    assert _line(8, ok,
                 f"arithmetic-mean diffusivity run exited {rc} (need 2); "
                 f"exceedance {[f'{p:.3f}' for p in probs]} "
                 f"({time.time() - t0:.0f}s)")


def test_criterion_9_reproducibility(tmp_path):
    t0 = time.time()
    cfg_path = tmp_path / "rep.cfg"
    cfg_path.write_text(
        "graph.n = [16, 32]\n"
        "field.kind = iid_uniform\n"
        "replicas = 100\n"
        "rho0 = cosine:0.5,0.5,1\n")
    outs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        main(["hydro", "--config", str(cfg_path), "--out", out, "--seed", "11"])
        outs.append(out)
    identical = all(
        open(os.path.join(outs[0], f), "rb").read()
        == open(os.path.join(outs[1], f), "rb").read()
        for f in ("report.json", "report.csv"))
    assert _line(9, identical,
                 f"repeated run byte-identical reports: {identical} "
                 f"({time.time() - t0:.0f}s)")
