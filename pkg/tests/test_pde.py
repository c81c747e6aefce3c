import numpy as np
import pytest

from exclusim.conductance import ConductanceField, assign
from exclusim.errors import ResolutionError, UnsupportedTopologyError
from exclusim.graphs import TestFunction, build_torus_1d, build_torus_2d
from exclusim.pde import (
    DensityProfile,
    cosine_decay_closed_form,
    effective_diffusivity_1d,
    heat_solve,
    limit_semigroup_on_vertices,
)


def test_profile_mesh_and_sampling():
    prof = DensityProfile.from_function(lambda u: np.cos(2 * np.pi * u[:, 0]), 256)
    assert prof.mesh_size == 256
    assert prof.mean() == pytest.approx(0.0, abs=1e-14)
    # periodic linear interpolation hits mesh points exactly and wraps
    assert prof.sample_at(np.array([0.5]))[0] == pytest.approx(-1.0)
    assert prof.sample_at(np.array([1.0]))[0] == pytest.approx(prof.values[0])
    mid = prof.sample_at(np.array([0.5 + 0.5 / 256]))[0]
    assert mid == pytest.approx(0.5 * (prof.values[128] + prof.values[129]))
    with pytest.raises(ResolutionError):
        DensityProfile(values=np.ones(2))
    with pytest.raises(ResolutionError):
        DensityProfile(values=np.array([1.0, np.nan, 0.0, 0.0]))


def test_heat_solve_against_closed_form():
    # [DERIVED] independent route: Fourier decay of the cosine mode
    prof = DensityProfile.from_function(
        lambda u: 0.5 + 0.5 * np.cos(2 * np.pi * u[:, 0]), 256)
    evolved = heat_solve(prof, 1.0, 0.05, 256)
    exact = 0.5 + 0.5 * np.exp(-4 * np.pi**2 * 0.05) * np.cos(2 * np.pi * evolved.mesh)
    assert np.max(np.abs(evolved.values - exact)) < 1e-4
    assert evolved.diffusivity == 1.0


def test_heat_solve_conserves_mean_exactly():
    prof = DensityProfile.from_function(
        lambda u: 0.3 + 0.2 * np.cos(2 * np.pi * 2 * u[:, 0]), 128)
    evolved = heat_solve(prof, 2.0, 0.1, 64)
    assert evolved.mean() == pytest.approx(prof.mean(), abs=1e-13)


def test_heat_solve_second_order_convergence():
    # halving the step size cuts the error by about four
    prof = DensityProfile.from_function(
        lambda u: 0.5 + 0.5 * np.cos(2 * np.pi * u[:, 0]), 1024)
    exact = 0.5 + 0.5 * np.exp(-4 * np.pi**2 * 0.05) * np.cos(2 * np.pi * prof.mesh)
    errs = [np.max(np.abs(heat_solve(prof, 1.0, 0.05, s).values - exact))
            for s in (16, 32, 64)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.2)


def test_heat_solve_max_principle_guard():
    # a spike pushed with a huge Crank-Nicolson step rings below zero and
    # must be rejected; enough steps resolve it
    vals = np.zeros(256)
    vals[128] = 1.0
    with pytest.raises(ResolutionError):
        heat_solve(DensityProfile(values=vals), 1.0, 0.001, 1)
    out = heat_solve(DensityProfile(values=vals), 1.0, 0.001, 4096)
    assert out.values.min() >= -1e-10


def test_heat_solve_t_zero_and_validation():
    prof = DensityProfile.from_function(lambda u: np.sin(2 * np.pi * u[:, 0]), 64)
    out = heat_solve(prof, 1.0, 0.0, 16)
    assert np.array_equal(out.values, prof.values)
    with pytest.raises(ValueError):
        heat_solve(prof, -1.0, 0.1, 16)


def test_effective_diffusivity_harmonic_mean():
    g = assign(ConductanceField.periodic([1.0, 2.0]), build_torus_1d(64))
    assert effective_diffusivity_1d(g) == pytest.approx(4.0 / 3.0)
    with pytest.raises(UnsupportedTopologyError):
        effective_diffusivity_1d(assign(ConductanceField.constant(1.0), build_torus_2d(4)))
    with pytest.raises(UnsupportedTopologyError):
        effective_diffusivity_1d(
            assign(ConductanceField.constant(1.0), build_torus_1d(16, b_n=3.0)))


def test_cosine_decay_closed_form():
    phi = TestFunction.cosine_mode(2)
    pts = np.linspace(0, 1, 7)[:, None]
    out = cosine_decay_closed_form(phi, 0.1, 1.5, pts)
    assert np.allclose(out, np.exp(-4 * np.pi**2 * 4 * 0.15) * phi(pts))
    const = TestFunction.constant(2.0)
    assert np.allclose(cosine_decay_closed_form(const, 0.1, 1.5, pts), 2.0)
    with pytest.raises(ValueError):
        cosine_decay_closed_form(TestFunction.bump([0.5], 0.2), 0.1, 1.0, pts)


def test_limit_semigroup_bump_path_matches_finer_mesh():
    # [DERIVED] dual-route: default mesh vs a much finer mesh oracle
    g = build_torus_1d(32)
    phi = TestFunction.bump([0.5], 0.25)
    coarse = limit_semigroup_on_vertices(g, phi, 0.05, 1.0)
    fine = limit_semigroup_on_vertices(g, phi, 0.05, 1.0, mesh_factor=32, steps=4096)
    assert np.max(np.abs(coarse - fine)) < 1e-4


def test_limit_semigroup_cosine_path():
    g = build_torus_1d(16)
    phi = TestFunction.cosine_mode(1)
    out = limit_semigroup_on_vertices(g, phi, 0.05, 4.0 / 3.0)
    exact = np.exp(-4 * np.pi**2 * (4.0 / 3.0) * 0.05) * phi(g.positions)
    assert np.allclose(out, exact)
