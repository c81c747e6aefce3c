"""Limit process on the torus: heat semigroup with effective diffusivity.

The limit of the diffusively rescaled walk in a 1-D conductance environment
is Brownian motion with scalar diffusivity equal to the harmonic mean of the
conductances.  heat_solve provides an independent Crank-Nicolson solver for
P_t rho0; cosine modes additionally have the closed-form Fourier decay
exp(-4 pi^2 |k|^2 D t), used as a cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .conductance import harmonic_mean
from .errors import ResolutionError, UnsupportedTopologyError
from .graphs import GraphInstance, TestFunction

__all__ = [
    "DensityProfile",
    "effective_diffusivity_1d",
    "heat_solve",
    "limit_semigroup_on_vertices",
    "cosine_decay_closed_form",
]


@dataclass(eq=False)
class DensityProfile:
    """Mesh-sampled function on the unit circle (mesh points j/M)."""

    values: np.ndarray
    diffusivity: float | None = None  # attached metadata for evolved profiles

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 4:
            raise ResolutionError("mesh must be one-dimensional with at least 4 points")
        if not np.all(np.isfinite(self.values)):
            raise ResolutionError("profile values must be finite")

    @property
    def mesh_size(self) -> int:
        return len(self.values)

    @property
    def mesh(self) -> np.ndarray:
        return np.arange(self.mesh_size) / self.mesh_size

    def mean(self) -> float:
        return float(np.mean(self.values))

    def sample_at(self, points: np.ndarray) -> np.ndarray:
        """Periodic linear interpolation at arbitrary torus points."""
        pts = np.asarray(points, dtype=float).reshape(-1) % 1.0
        m = self.mesh_size
        x = pts * m
        i0 = np.floor(x).astype(int) % m
        frac = x - np.floor(x)
        return (1.0 - frac) * self.values[i0] + frac * self.values[(i0 + 1) % m]

    @staticmethod
    def from_function(f, mesh_size: int) -> "DensityProfile":
        mesh = (np.arange(mesh_size) / mesh_size)[:, None]
        return DensityProfile(values=np.asarray(f(mesh), dtype=float))


def effective_diffusivity_1d(g: GraphInstance) -> float:
    """Quenched effective diffusivity of the diffusively rescaled ring walk.

    Equals the harmonic mean of the conductances (Stone's space-time-change
    theory for 1-D walks).
    """
    if not g.is_ring():
        raise UnsupportedTopologyError("effective diffusivity implemented for 1-D rings only")
    if g.b_n != g.num_vertices**2:
        raise UnsupportedTopologyError(
            "effective diffusivity assumes the diffusive scaling b_n = n^2"
        )
    return harmonic_mean(g)


_SOLVER_CACHE: dict[tuple[int, float], object] = {}


def _cn_operators(m: int, alpha: float):
    """Factorized (I - alpha A) and matrix (I + alpha A), A = periodic Laplacian."""
    key = (m, alpha)
    hit = _SOLVER_CACHE.get(key)
    if hit is not None:
        return hit
    main = -2.0 * np.ones(m)
    off = np.ones(m - 1)
    A = sparse.diags([off, main, off], [-1, 0, 1], format="lil")
    A[0, m - 1] = 1.0
    A[m - 1, 0] = 1.0
    A = A.tocsc()
    eye = sparse.identity(m, format="csc")
    lhs = splu(eye - alpha * A)
    rhs = (eye + alpha * A).tocsr()
    if len(_SOLVER_CACHE) > 32:
        _SOLVER_CACHE.clear()
    _SOLVER_CACHE[key] = (lhs, rhs)
    return lhs, rhs


def heat_solve(rho: DensityProfile, D: float, t: float, steps: int) -> DensityProfile:
    """Crank-Nicolson evolution of du/dt = D u'' on the periodic mesh.

    Second-order accurate in mesh width and step size; conserves the mesh
    mean exactly.  Raises ResolutionError when the output violates the
    maximum principle, which signals too few steps for the requested t.
    """
    if D <= 0 or t < 0 or steps < 1:
        raise ValueError("need D > 0, t >= 0, steps >= 1")
    if t == 0:
        return DensityProfile(values=rho.values.copy(), diffusivity=D)
    m = rho.mesh_size
    dt = t / steps
    dx = 1.0 / m
    alpha = 0.5 * D * dt / dx**2
    lhs, rhs = _cn_operators(m, alpha)
    u = rho.values.copy()
    for _ in range(steps):
        u = lhs.solve(rhs @ u)
    lo, hi = rho.values.min(), rho.values.max()
    if u.min() < lo - 1e-10 or u.max() > hi + 1e-10:
        raise ResolutionError(
            "Crank-Nicolson output violates the maximum principle; increase steps"
        )
    return DensityProfile(values=u, diffusivity=D)


def cosine_decay_closed_form(phi: TestFunction, t: float, D: float, points: np.ndarray) -> np.ndarray:
    """Exact P_t phi for cosine modes: exp(-4 pi^2 |k|^2 D t) cos(2 pi k.x)."""
    if phi.kind == "constant":
        return phi(points)
    if phi.kind != "cosine":
        raise ValueError("closed form available for cosine modes and constants only")
    k2 = float(sum(kk**2 for kk in phi.k))
    return np.exp(-4.0 * np.pi**2 * k2 * D * t) * phi(points)


def limit_semigroup_on_vertices(g: GraphInstance, phi: TestFunction, t: float, D: float,
                                mesh_factor: int = 4, steps: int | None = None) -> np.ndarray:
    """P_t phi sampled at the vertex positions of g.

    Cosine modes and constants use the closed form (eigenfunctions of the
    torus Laplacian).  Other catalog functions are evolved with heat_solve
    on a mesh of resolution >= mesh_factor * |V_n| aligned with the vertex
    grid (1-D only).
    """
    if phi.kind in ("cosine", "constant"):
        return cosine_decay_closed_form(phi, t, D, g.positions)
    if g.dimension != 1:
        raise UnsupportedTopologyError("PDE path for non-cosine functions is 1-D only")
    m = mesh_factor * g.num_vertices
    if steps is None:
        steps = max(256, m)
    profile = DensityProfile.from_function(phi, m)
    evolved = heat_solve(profile, D, t, steps)
    return evolved.sample_at(g.positions[:, 0])
