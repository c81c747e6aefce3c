"""Harris graphical construction: Poisson clocks, exclusion and walker evolution.

Each edge b carries an independent Poisson clock of rate b_n * c_n(b).  At a
ring of the clock on {x, y} the occupancies of x and y are transposed
unconditionally, which realizes the exclusion rule exactly and couples the
exclusion process with the single walker driven by the same clocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import HorizonError, InvalidProfileError
from .graphs import GraphInstance
from .seeding import derive_rng

__all__ = [
    "EventLog",
    "sample_clocks",
    "evolve_exclusion",
    "evolve_walker",
    "component_statistics",
    "ComponentStatistics",
    "sample_product_measure",
]


@dataclass(eq=False)
class EventLog:
    """Time-sorted merged ring times of all edge clocks on [0, T].

    Ties in ring times (measure zero, finite precision only) are broken by
    edge rank.  Equal (graph, field, seed, T) regenerate an identical log.
    """

    T: float
    times: np.ndarray  # (m,) float64, sorted
    edge_ids: np.ndarray  # (m,) int64, index into edges
    edges: np.ndarray  # (E, 2) endpoint table, shared with the graph
    rates: np.ndarray  # (E,) clock rates b_n * c_n(b)
    num_vertices: int
    seed: int

    @property
    def num_events(self) -> int:
        return len(self.times)

    def count_until(self, t: float) -> int:
        if t > self.T:
            raise HorizonError(f"t={t} exceeds horizon T={self.T}")
        return int(np.searchsorted(self.times, t, side="right"))


def sample_clocks(g: GraphInstance, T: float, seed: int) -> EventLog:
    """Sample all edge clocks on [0, T] and merge into one sorted log."""
    if T <= 0:
        raise HorizonError(f"horizon must be positive, got {T}")
    rates = g.b_n * g.require_conductance()
    rng = derive_rng(seed, "clocks")
    counts = rng.poisson(rates * T)
    total = int(counts.sum())
    times = rng.random(total) * T
    edge_ids = np.repeat(np.arange(g.num_edges, dtype=np.int64), counts)
    order = np.lexsort((edge_ids, times))
    return EventLog(
        T=float(T),
        times=times[order],
        edge_ids=edge_ids[order],
        edges=g.edges,
        rates=rates,
        num_vertices=g.num_vertices,
        seed=int(seed),
    )


@njit(cache=True, nogil=True)
def _swap_scan(eta, edge_ids, eu, ev, m):  # pragma: no cover - compiled
    for i in range(m):
        e = edge_ids[i]
        u = eu[e]
        v = ev[e]
        tmp = eta[u]
        eta[u] = eta[v]
        eta[v] = tmp


@njit(cache=True, nogil=True)
def _walk_scan(x0, edge_ids, eu, ev, m):  # pragma: no cover - compiled
    x = x0
    for i in range(m):
        e = edge_ids[i]
        if eu[e] == x:
            x = ev[e]
        elif ev[e] == x:
            x = eu[e]
    return x


def evolve_exclusion(eta0: np.ndarray, log: EventLog, t: float) -> np.ndarray:
    """Occupancies at time t: transpose endpoint values at each ring <= t."""
    eta = np.array(eta0, dtype=np.uint8)
    if eta.shape != (log.num_vertices,):
        raise ValueError("configuration must have one bit per vertex")
    m = log.count_until(t)
    _swap_scan(eta, log.edge_ids, log.edges[:, 0], log.edges[:, 1], m)
    return eta


def evolve_walker(x0: int, log: EventLog, t: float) -> int:
    """Position at time t of the walker driven by the same clocks."""
    m = log.count_until(t)
    return int(_walk_scan(np.int64(x0), log.edge_ids, log.edges[:, 0], log.edges[:, 1], m))


@dataclass
class ComponentStatistics:
    """Connected-component sizes of ringing-edge subgraphs over time windows."""

    max_size: int
    histogram: dict[int, int]  # size -> count, for the worst window
    num_windows: int


def component_statistics(log: EventLog, eps: float) -> ComponentStatistics:
    """Worst-window component statistics.

    Partitions [0, T] into windows of length eps, builds for each window the
    subgraph of edges ringing at least once inside it, and reports the
    component-size histogram of the window achieving the largest component.
    """
    if not 0 < eps <= log.T:
        raise ValueError("need 0 < eps <= T")
    nw = int(np.ceil(log.T / eps))
    nv = log.num_vertices
    if log.num_events == 0:
        return ComponentStatistics(max_size=1, histogram={1: nv}, num_windows=nw)
    win = np.minimum((log.times / eps).astype(np.int64), nw - 1)
    boundaries = np.searchsorted(win, np.arange(nw + 1))
    best = ComponentStatistics(max_size=1, histogram={1: nv}, num_windows=nw)
    for k in range(nw):
        lo, hi = boundaries[k], boundaries[k + 1]
        if lo == hi:
            continue
        eids = np.unique(log.edge_ids[lo:hi])
        u, v = log.edges[eids, 0], log.edges[eids, 1]
        adj = csr_matrix((np.ones(len(eids)), (u, v)), shape=(nv, nv))
        _, labels = connected_components(adj, directed=False)
        sizes = np.bincount(labels)
        mx = int(sizes.max())
        if mx > best.max_size:
            size_counts = np.bincount(sizes)
            best = ComponentStatistics(
                max_size=mx,
                histogram={int(s): int(c) for s, c in enumerate(size_counts) if c > 0 and s > 0},
                num_windows=nw,
            )
    return best


def sample_product_measure(g: GraphInstance, rho0, seed: int) -> np.ndarray:
    """Independent Bernoulli(rho0(pos(x))) occupancies, deterministic in seed.

    rho0 may be a scalar, a callable on position arrays (TestFunction,
    DensityProfile.sample_at, ...), or an array of per-vertex marginals.
    """
    if np.isscalar(rho0):
        probs = np.full(g.num_vertices, float(rho0))
    elif callable(rho0):
        probs = np.asarray(rho0(g.positions), dtype=float)
    else:
        probs = np.asarray(rho0, dtype=float)
    if probs.shape != (g.num_vertices,):
        raise InvalidProfileError("profile must give one marginal per vertex")
    if np.any(probs < 0) or np.any(probs > 1):
        raise InvalidProfileError("initial density profile must take values in [0, 1]")
    rng = derive_rng(seed, "initial")
    return (rng.random(g.num_vertices) < probs).astype(np.uint8)
