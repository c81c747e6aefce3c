"""Quenched conductance environments.

A field is a pure function of (kind, seed, edge rank): sampling twice with
equal seeds gives bitwise-identical conductances.  Randomness comes from a
counter-based Philox stream keyed by the field seed, so assignments are
stable across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidGraphError
from .graphs import GraphInstance
from .seeding import derive_rng

__all__ = ["ConductanceField", "assign", "harmonic_mean", "arithmetic_mean"]


@dataclass(frozen=True)
class ConductanceField:
    kind: str  # constant | periodic | iid_uniform | iid_pareto
    seed: int = 0
    value: float = 1.0
    pattern: tuple[float, ...] = ()
    lo: float = 1.0
    hi: float = 2.0
    alpha: float = 2.0
    scale: float = 1.0

    @staticmethod
    def constant(value: float) -> "ConductanceField":
        if value <= 0:
            raise InvalidGraphError("constant conductance must be positive")
        return ConductanceField(kind="constant", value=float(value))

    @staticmethod
    def periodic(pattern) -> "ConductanceField":
        pattern = tuple(float(p) for p in pattern)
        if not pattern or any(p <= 0 for p in pattern):
            raise InvalidGraphError("periodic pattern must be nonempty and positive")
        return ConductanceField(kind="periodic", pattern=pattern)

    @staticmethod
    def iid_uniform(lo: float, hi: float, seed: int = 0) -> "ConductanceField":
        if not 0 < lo <= hi < np.inf:
            raise InvalidGraphError("need 0 < lo <= hi < inf")
        return ConductanceField(kind="iid_uniform", lo=float(lo), hi=float(hi), seed=int(seed))

    @staticmethod
    def iid_pareto(alpha: float, scale: float, seed: int = 0) -> "ConductanceField":
        if alpha <= 0 or scale <= 0:
            raise InvalidGraphError("pareto needs alpha > 0 and scale > 0")
        return ConductanceField(kind="iid_pareto", alpha=float(alpha), scale=float(scale), seed=int(seed))

    def with_seed(self, seed: int) -> "ConductanceField":
        return ConductanceField(
            kind=self.kind, seed=int(seed), value=self.value, pattern=self.pattern,
            lo=self.lo, hi=self.hi, alpha=self.alpha, scale=self.scale,
        )


def _periodic_index(edges: np.ndarray) -> np.ndarray:
    # Pattern position of each edge: along a ring the edge {i, i+1} gets
    # index i and the wrap edge {0, n-1} gets index n-1, so patterns tile
    # the ring in order.  Edges between non-consecutive ids (2-D grids)
    # fall back to the larger endpoint for the same reason.
    u, v = edges[:, 0], edges[:, 1]
    return np.where(v == u + 1, u, v)


def assign(field: ConductanceField, g: GraphInstance) -> GraphInstance:
    """Return g with conductances filled for every edge."""
    ne = g.num_edges
    if field.kind == "constant":
        values = np.full(ne, field.value)
    elif field.kind == "periodic":
        pattern = np.asarray(field.pattern)
        values = pattern[_periodic_index(g.edges) % len(pattern)]
    elif field.kind == "iid_uniform":
        rng = derive_rng(field.seed, "field-uniform")
        values = rng.uniform(field.lo, field.hi, size=ne)
    elif field.kind == "iid_pareto":
        rng = derive_rng(field.seed, "field-pareto")
        values = field.scale * (1.0 + rng.pareto(field.alpha, size=ne))
    else:
        raise InvalidGraphError(f"unknown field kind {field.kind!r}")
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise InvalidGraphError("sampled a non-positive or nonfinite conductance")
    return g.with_conductance(values)


def harmonic_mean(g: GraphInstance) -> float:
    """Harmonic mean of the edge conductances: ((1/|E|) sum 1/c)^-1."""
    c = g.require_conductance()
    return float(len(c) / np.sum(1.0 / c))


def arithmetic_mean(g: GraphInstance) -> float:
    """Arithmetic mean of the edge conductances (negative-control diffusivity)."""
    return float(np.mean(g.require_conductance()))
