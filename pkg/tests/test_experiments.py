import math

import numpy as np
import pytest

from exclusim.conductance import ConductanceField, assign
from exclusim.config import ProfileSpec, parse_config
from exclusim.graphs import TestFunction, build_torus_1d
from exclusim.harris import sample_clocks, sample_product_measure
from exclusim.kernel import semigroup_apply
from exclusim.experiments import (
    duality_experiment,
    hom_discrepancy,
    homogenization_experiment,
    hydro_experiment,
    initial_pairing_check,
    wilson_halfwidth,
    z_statistic,
)


def test_wilson_halfwidth_values():
    # [DERIVED] closed form at p = 0: z sqrt(z^2 / (4 n^2)) / (1 + z^2/n)
    n = 200
    assert wilson_halfwidth(0.0, n) == pytest.approx((0.5 / n) / (1 + 1.0 / n))
    assert wilson_halfwidth(0.5, n) == pytest.approx(
        math.sqrt(0.25 / n + 1 / (4 * n * n)) / (1 + 1.0 / n))
    assert wilson_halfwidth(0.0, n) > 0.0  # never degenerate at the boundary


def test_z_statistic_matches_direct_computation():
    g = assign(ConductanceField.constant(1.0), build_torus_1d(16))
    phi = TestFunction.cosine_mode(1)
    eta0 = sample_product_measure(g, 0.5, seed=2)
    log = sample_clocks(g, 0.05, seed=3)
    z = z_statistic(g, phi, eta0, log, 0.05)
    from exclusim.harris import evolve_exclusion
    pv = phi(g.positions)
    eta_t = evolve_exclusion(eta0, log, 0.05)
    direct = (pv @ eta_t - semigroup_apply(g, pv, 0.05) @ eta0) / g.a_n
    assert z == pytest.approx(direct, abs=1e-12)


def test_z_statistic_zero_for_deterministic_fixture():
    # full configuration: swaps never change eta, and P_t phi sums against
    # the all-ones vector exactly like phi does (symmetric kernel)
    g = assign(ConductanceField.constant(1.0), build_torus_1d(12))
    phi = TestFunction.cosine_mode(1)
    eta0 = np.ones(12, dtype=np.uint8)
    log = sample_clocks(g, 0.05, seed=4)
    assert z_statistic(g, phi, eta0, log, 0.05) == pytest.approx(0.0, abs=1e-10)


def test_duality_experiment_report_shape():
    cfg = parse_config("graph.n = [8, 16]\nreplicas = 100\n", base_seed=3)
    report = duality_experiment(cfg)
    assert report.kind == "duality"
    assert len(report.records) == 2
    for rec in report.records:
        assert rec.stat >= 0.0
        assert rec.bound > 0.0
    # bound holds easily at this scale
    assert all(r.stat <= r.bound + 3 * r.se for r in report.records)
    assert "doubling_ratios" in report.extras


def test_hom_discrepancy_decreases_on_periodic_field():
    phi = TestFunction.cosine_mode(1)
    discs = []
    for n in (32, 64, 128):
        g = assign(ConductanceField.periodic([1.0, 2.0]), build_torus_1d(n))
        discs.append(hom_discrepancy(g, phi, 0.05, 4.0 / 3.0))
    assert discs[0] > discs[1] > discs[2]


def test_homogenization_experiment_pass_and_compare():
    cfg = parse_config(
        "graph.n = [32, 64]\nfield.kind = periodic\nfield.pattern = [1, 2]\n"
        "compare_diffusivity = arithmetic\nmax_discrepancy = 0.01\n")
    report = homogenization_experiment(cfg)
    assert report.passed
    recs = {r.n: r for r in report.records}
    assert recs[64].extra["D"] == pytest.approx(4.0 / 3.0)
    assert recs[64].extra["D_alt"] == pytest.approx(1.5)
    assert recs[64].stat < recs[64].extra["disc_alt"]


def test_homogenization_experiment_fails_with_wrong_diffusivity():
    cfg = parse_config(
        "graph.n = [32, 64]\nfield.kind = periodic\nfield.pattern = [1, 2]\n"
        "diffusivity = 1.5\nmax_discrepancy = 0.001\n")
    report = homogenization_experiment(cfg)
    assert not report.passed


def test_hydro_experiment_smoke():
    cfg = parse_config(
        "graph.n = [16, 32]\nreplicas = 50\nrho0 = cosine:0.5,0.5,1\ndelta = 0.3\n",
        base_seed=1)
    report = hydro_experiment(cfg)
    assert report.kind == "hydro"
    assert report.passed  # delta = 0.3 is generous at this scale
    assert report.extras["pde_cross_checks"]
    for chk in report.extras["pde_cross_checks"]:
        assert chk["abs_err"] < 1e-4


def test_hydro_experiment_threads_match_serial():
    body = "graph.n = [16]\nreplicas = 20\nrho0 = cosine:0.5,0.5,1\n"
    r1 = hydro_experiment(parse_config(body, base_seed=2, threads=1))
    r2 = hydro_experiment(parse_config(body, base_seed=2, threads=4))
    assert [rec.stat for rec in r1.records] == [rec.stat for rec in r2.records]


def test_initial_pairing_check_small():
    g = assign(ConductanceField.constant(1.0), build_torus_1d(64))
    rho0 = ProfileSpec.cosine(0.5, 0.5, 1)
    phi = TestFunction.cosine_mode(1)
    vals = semigroup_apply(g, phi(g.positions), 0.05)
    # [DERIVED] E[(1/a_n) sum vals * eta0] = (1/a_n) sum vals * rho0(pos)
    target = float(vals @ rho0(g.positions)) / g.a_n
    miss = initial_pairing_check(g, rho0, [vals], [target], delta=0.2, replicas=100, base_seed=0)
    assert miss <= 0.05
    with pytest.raises(ValueError):
        initial_pairing_check(g, rho0, [vals], [], delta=0.2, replicas=10)
