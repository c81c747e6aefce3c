"""Finite graph sequences on the unit torus, test functions and empirical measures.

Vertices live on the d-dimensional unit torus (coordinates in [0,1)).
The empirical measure m_n = (1/a_n) sum_x delta_x converges vaguely to
Lebesgue measure for the uniform grids built here.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidGraphError

__all__ = [
    "GraphInstance",
    "TestFunction",
    "build_torus_1d",
    "build_torus_2d",
    "empirical_integral",
    "vague_discrepancy",
    "torus_delta",
]


def torus_delta(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Componentwise wrapped distance on the unit torus, shape (m, d)."""
    diff = np.abs(points - center)
    return np.minimum(diff, 1.0 - diff)


@dataclass(eq=False)
class GraphInstance:
    """Finite weighted graph embedded in the unit torus.

    edges are canonical: u < v, lexicographically sorted, no duplicates,
    no self loops.  conductance is None until a field is assigned.
    """

    n: int
    positions: np.ndarray  # (V, d), coordinates in [0, 1)
    edges: np.ndarray  # (E, 2) int64, canonical order
    a_n: float
    b_n: float
    conductance: np.ndarray | None = None

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.edges = np.asarray(self.edges, dtype=np.int64)
        if self.a_n <= 0 or self.b_n <= 0:
            raise InvalidGraphError("scaling constants must be strictly positive")
        if self.edges.size:
            u, v = self.edges[:, 0], self.edges[:, 1]
            if np.any(u >= v):
                raise InvalidGraphError("edges must satisfy u < v")
            if np.any(v >= self.num_vertices) or np.any(u < 0):
                raise InvalidGraphError("edge endpoint out of range")
            if len(np.unique(self.edges, axis=0)) != len(self.edges):
                raise InvalidGraphError("duplicate edges")
        if self.conductance is not None:
            self.conductance = np.asarray(self.conductance, dtype=float)
            if self.conductance.shape != (len(self.edges),):
                raise InvalidGraphError("conductance shape mismatch")
            if not np.all(np.isfinite(self.conductance)) or np.any(self.conductance <= 0):
                raise InvalidGraphError("conductances must be strictly positive and finite")

    @property
    def num_vertices(self) -> int:
        return self.positions.shape[0]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    def with_conductance(self, values: np.ndarray) -> "GraphInstance":
        return replace(self, conductance=np.asarray(values, dtype=float))

    def require_conductance(self) -> np.ndarray:
        if self.conductance is None:
            raise InvalidGraphError("graph has no conductances assigned")
        return self.conductance

    def is_ring(self) -> bool:
        """True for the canonical 1-D ring built by build_torus_1d."""
        if self.dimension != 1:
            return False
        nv = self.num_vertices
        expected = _ring_edges(nv)
        return self.edges.shape == expected.shape and bool(np.all(self.edges == expected))


def _ring_edges(n: int) -> np.ndarray:
    pairs = [(i, i + 1) for i in range(n - 1)]
    if n > 2:
        pairs.append((0, n - 1))
    edges = np.array(sorted(pairs), dtype=np.int64)
    return edges


def build_torus_1d(n: int, a_n: float | None = None, b_n: float | None = None) -> GraphInstance:
    """Ring of n vertices at positions i/n.

    Default (diffusive) scaling: a_n = n, b_n = n^2.  Pass a_n/b_n for a
    custom scheme.  The 2-ring keeps a single deduplicated edge {0, 1}.
    """
    if n < 2:
        raise InvalidGraphError(f"ring needs n >= 2, got {n}")
    positions = (np.arange(n, dtype=float) / n)[:, None]
    return GraphInstance(
        n=n,
        positions=positions,
        edges=_ring_edges(n),
        a_n=float(n) if a_n is None else float(a_n),
        b_n=float(n) ** 2 if b_n is None else float(b_n),
    )


def build_torus_2d(n: int, a_n: float | None = None, b_n: float | None = None) -> GraphInstance:
    """n x n grid on the 2-D unit torus with nearest-neighbor edges.

    Default scaling a_n = n^2, b_n = n^2.  Parallel edges arising in the
    2 x 2 grid are merged.
    """
    if n < 2:
        raise InvalidGraphError(f"torus grid needs n >= 2, got {n}")
    idx = np.arange(n * n).reshape(n, n)
    positions = np.stack(
        [np.repeat(np.arange(n), n) / n, np.tile(np.arange(n), n) / n], axis=1
    )
    pairs = []
    for i in range(n):
        for j in range(n):
            a = idx[i, j]
            for bi, bj in ((i + 1) % n, j), (i, (j + 1) % n):
                b = idx[bi, bj]
                if a != b:
                    pairs.append((min(a, b), max(a, b)))
    edges = np.unique(np.array(pairs, dtype=np.int64), axis=0)
    return GraphInstance(
        n=n,
        positions=positions,
        edges=edges,
        a_n=float(n * n) if a_n is None else float(a_n),
        b_n=float(n * n) if b_n is None else float(b_n),
    )


@dataclass(frozen=True)
class TestFunction:
    """Closed-form test function on the torus (the C_c(X) catalog).

    kinds: "cosine" with integer mode vector k, "bump" with center/radius,
    "constant".  Evaluation is pure and vectorized over points of shape
    (m, d) or (m,) in one dimension.
    """

    kind: str
    k: tuple[int, ...] = ()
    center: tuple[float, ...] = ()
    radius: float = 0.0
    value: float = 0.0

    @staticmethod
    def cosine_mode(*k: int) -> "TestFunction":
        return TestFunction(kind="cosine", k=tuple(int(x) for x in k))

    @staticmethod
    def bump(center, radius: float) -> "TestFunction":
        center = tuple(float(c) for c in np.atleast_1d(center))
        if not 0 < radius < 0.5:
            raise ValueError("bump radius must lie in (0, 0.5) for compact support")
        return TestFunction(kind="bump", center=center, radius=float(radius))

    @staticmethod
    def constant(value: float) -> "TestFunction":
        return TestFunction(kind="constant", value=float(value))

    @property
    def dimension(self) -> int:
        if self.kind == "cosine":
            return len(self.k)
        if self.kind == "bump":
            return len(self.center)
        return 0  # constants evaluate in any dimension

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] == 1 and np.ndim(points) == 1 and pts.shape[1] > 1:
            pts = pts.T  # (m,) in 1-D came in as a row
        if self.kind == "constant":
            return np.full(pts.shape[0], self.value)
        if self.kind == "cosine":
            k = np.asarray(self.k, dtype=float)
            return np.cos(2.0 * np.pi * pts @ k)
        # smooth bump: exp(1 - 1/(1 - (r/R)^2)) inside radius R, 0 outside
        delta = torus_delta(pts, np.asarray(self.center))
        r2 = np.sum(delta**2, axis=1) / self.radius**2
        out = np.zeros(pts.shape[0])
        inside = r2 < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
        return out

    def torus_integral(self, quad_points: int = 200_001) -> float:
        """Integral over the torus w.r.t. Lebesgue measure.

        Closed form for constants and cosine modes; trapezoid quadrature
        for bumps (1-D and 2-D).
        """
        if self.kind == "constant":
            return self.value
        if self.kind == "cosine":
            return 1.0 if all(kk == 0 for kk in self.k) else 0.0
        d = len(self.center)
        if d == 1:
            xs = np.linspace(0.0, 1.0, quad_points)[:-1][:, None]
            return float(np.mean(self(xs)))
        if d == 2:
            m = 2048
            g = np.arange(m) / m
            xx, yy = np.meshgrid(g, g, indexing="ij")
            pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
            return float(np.mean(self(pts)))
        raise ValueError("bump integral implemented for d <= 2")


def empirical_integral(g: GraphInstance, phi, values: np.ndarray | None = None) -> float:
    """m_n-weighted sum (1/a_n) sum_x phi(pos(x)) * values(x).

    values=None uses all ones, giving the plain empirical measure m_n(phi).
    phi may be a TestFunction or any callable on position arrays.
    """
    pv = phi(g.positions)
    if values is None:
        return float(np.sum(pv) / g.a_n)
    values = np.asarray(values, dtype=float)
    if values.shape != (g.num_vertices,):
        raise ValueError("values must be defined on all vertices")
    return float(np.dot(pv, values) / g.a_n)


def vague_discrepancy(g: GraphInstance, phi: TestFunction) -> float:
    """|m_n(phi) - integral of phi over the torus|."""
    return abs(empirical_integral(g, phi) - phi.torus_integral())
