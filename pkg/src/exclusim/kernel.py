"""Exact one-particle computations for the walk generated by b_n * c_n.

The semigroup P_t^n is evaluated by uniformization: with Lam the maximal
total exit rate and P = I + L/Lam a stochastic matrix,
P_t = sum_k Poisson(Lam t)(k) P^k, truncated at tail mass tol.  When Lam
exceeds UNIFORMIZATION_RATE_CAP the vector solve falls back to adaptive
explicit integration.  Dense kernels additionally use scaling and squaring
to keep the truncated sum short.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.stats import poisson

from .errors import HorizonError, NumericalError, TooLargeError
from .graphs import GraphInstance
from .harris import EventLog, evolve_exclusion

__all__ = [
    "TransitionKernel",
    "apply_generator",
    "generator_matrix",
    "semigroup_apply",
    "transition_matrix",
    "dirichlet_form",
    "duhamel_residual",
]

DENSE_KERNEL_CAP = 4096
DENSE_MATVEC_CAP = 1024
UNIFORMIZATION_RATE_CAP = 1.0e6


@dataclass(eq=False)
class TransitionKernel:
    """Dense t-indexed stochastic symmetric matrix p_n(t, x, y)."""

    t: float
    matrix: np.ndarray

    def max_asymmetry(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def row_sum_deviation(self) -> float:
        return float(np.max(np.abs(self.matrix.sum(axis=1) - 1.0)))

    def min_entry(self) -> float:
        return float(self.matrix.min())


_GEN_CACHE: dict[int, tuple] = {}


def generator_matrix(g: GraphInstance):
    """(L, Lam): generator as dense/CSR matrix and the max total exit rate."""
    key = id(g)
    hit = _GEN_CACHE.get(key)
    if hit is not None and hit[0] is g:
        return hit[1], hit[2]
    c = g.require_conductance()
    nv = g.num_vertices
    u, v = g.edges[:, 0], g.edges[:, 1]
    w = g.b_n * c
    exit_rate = np.zeros(nv)
    np.add.at(exit_rate, u, w)
    np.add.at(exit_rate, v, w)
    lam = float(exit_rate.max())
    rows = np.concatenate([u, v, np.arange(nv)])
    cols = np.concatenate([v, u, np.arange(nv)])
    vals = np.concatenate([w, w, -exit_rate])
    L = sparse.csr_matrix((vals, (rows, cols)), shape=(nv, nv))
    if nv <= DENSE_MATVEC_CAP:
        L = L.toarray()
    if len(_GEN_CACHE) > 64:
        _GEN_CACHE.clear()
    _GEN_CACHE[key] = (g, L, lam)
    return L, lam


def apply_generator(g: GraphInstance, f: np.ndarray) -> np.ndarray:
    """(L_n f)(x) = b_n sum_{y~x} c_n(x,y) (f(y) - f(x))."""
    f = np.asarray(f, dtype=float)
    L, _ = generator_matrix(g)
    return L @ f


@lru_cache(maxsize=4096)
def _poisson_window(mu: float, tol: float) -> tuple[int, np.ndarray]:
    """Index range and renormalized Poisson(mu) weights with tail mass <= tol."""
    if mu <= 0:
        return 0, np.ones(1)
    lo = int(poisson.ppf(tol / 2.0, mu)) if mu > 20 else 0
    hi = int(poisson.isf(tol / 2.0, mu)) + 1
    ks = np.arange(lo, hi + 1)
    w = poisson.pmf(ks, mu)
    s = w.sum()
    if s <= 0:
        raise NumericalError("poisson window degenerated")
    return lo, w / s


def _uniformized(L, lam: float):
    nv = L.shape[0]
    if sparse.issparse(L):
        return (sparse.identity(nv, format="csr") + L / lam).tocsr()
    return np.eye(nv) + L / lam


def _apply_uniformization(L, lam: float, phi: np.ndarray, t: float, tol: float) -> np.ndarray:
    mu = lam * t
    lo, w = _poisson_window(mu, tol)
    P = _uniformized(L, lam)
    v = phi.astype(float, copy=True)
    acc = np.zeros_like(v)
    if lo == 0:
        acc += w[0] * v
    kmax = lo + len(w) - 1
    for k in range(1, kmax + 1):
        v = P @ v
        if k >= lo:
            acc += w[k - lo] * v
    return acc


def _apply_adaptive(L, phi: np.ndarray, t: float, tol: float) -> np.ndarray:
    if sparse.issparse(L):
        rhs = lambda _s, y: L @ y
    else:
        rhs = lambda _s, y: L.dot(y)
    sol = solve_ivp(rhs, (0.0, t), phi.astype(float), method="RK45",
                    rtol=min(1e-8, tol), atol=tol * 1e-2)
    if not sol.success:
        raise NumericalError(f"adaptive integration failed: {sol.message}")
    return sol.y[:, -1]


def semigroup_apply(g: GraphInstance, phi: np.ndarray, t: float, tol: float = 1e-10) -> np.ndarray:
    """P_t^n phi by uniformization (adaptive integration for stiff fields)."""
    if t < 0 or tol <= 0:
        raise ValueError("need t >= 0 and tol > 0")
    phi = np.asarray(phi, dtype=float)
    if t == 0:
        return phi.copy()
    L, lam = generator_matrix(g)
    if lam > UNIFORMIZATION_RATE_CAP:
        out = _apply_adaptive(L, phi, t, tol)
    else:
        out = _apply_uniformization(L, lam, phi, t, tol)
    if not np.all(np.isfinite(out)):
        raise NumericalError("semigroup application produced nonfinite values")
    return out


def transition_matrix(g: GraphInstance, t: float, tol: float = 1e-12) -> TransitionKernel:
    """Full kernel p_n(t, ., .) via uniformization with scaling and squaring.

    The squaring halves the uniformization constant exponentially; the base
    truncation tolerance is divided by 2^m so the final kernel meets tol.
    """
    nv = g.num_vertices
    if nv > DENSE_KERNEL_CAP:
        raise TooLargeError(
            f"dense kernel capped at {DENSE_KERNEL_CAP} vertices ({nv} requested); "
            "use Monte Carlo estimation via harris.sample_clocks/evolve_walker"
        )
    if t < 0:
        raise ValueError("need t >= 0")
    if t == 0:
        return TransitionKernel(t=0.0, matrix=np.eye(nv))
    L, lam = generator_matrix(g)
    if sparse.issparse(L):
        L = L.toarray()
    mu = lam * t
    m = max(0, math.ceil(math.log2(mu / 16.0))) if mu > 16.0 else 0
    base_t = t / (1 << m)
    base_tol = tol / (1 << (m + 1))
    lo, w = _poisson_window(lam * base_t, base_tol)
    P = _uniformized(L, lam)
    V = np.eye(nv)
    K = np.zeros((nv, nv))
    if lo == 0:
        K += w[0] * V
    kmax = lo + len(w) - 1
    for k in range(1, kmax + 1):
        V = P @ V
        if k >= lo:
            K += w[k - lo] * V
    for _ in range(m):
        K = K @ K
    if not np.all(np.isfinite(K)):
        raise NumericalError("kernel computation produced nonfinite values")
    return TransitionKernel(t=float(t), matrix=K)


def dirichlet_form(g: GraphInstance, phi: np.ndarray) -> float:
    """Energy <phi, -L_n phi>_{m_n} = (b_n/a_n) sum_{{x,y} in E} c(x,y)(phi_x - phi_y)^2."""
    phi = np.asarray(phi, dtype=float)
    c = g.require_conductance()
    diff = phi[g.edges[:, 0]] - phi[g.edges[:, 1]]
    return float(g.b_n / g.a_n * np.sum(c * diff**2))


def duhamel_residual(g: GraphInstance, eta0: np.ndarray, log: EventLog, t: float,
                     tol: float = 1e-5) -> float:
    """Pathwise defect of the martingale decomposition on a given event log.

    Left side: eta(t) from the graphical construction.  Right side: kernel
    term P_t eta(0) plus the stochastic integral, whose jump part is summed
    exactly over the log's events and whose compensator is integrated by
    composite midpoint quadrature with step <= tol.  Returns the max over
    vertices of |LHS - RHS|.

    The time integral is evaluated by propagating the running sum with the
    semigroup between quadrature nodes, so each step is a short
    uniformization of length <= tol.
    """
    if t > log.T:
        raise HorizonError(f"t={t} exceeds horizon T={log.T}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    eta0 = np.asarray(eta0, dtype=np.uint8)
    lhs = evolve_exclusion(eta0, log, t).astype(float)
    base = semigroup_apply(g, eta0.astype(float), t, tol=1e-13)

    L, lam = generator_matrix(g)
    if sparse.issparse(L):
        L = L.toarray()
    P = _uniformized(L, lam)

    def propagate(vec: np.ndarray, dt: float) -> np.ndarray:
        if dt <= 0:
            return vec
        lo, w = _poisson_window(lam * dt, 1e-14)
        v = vec
        acc = np.zeros_like(vec)
        if lo == 0:
            acc = acc + w[0] * v
        kmax = lo + len(w) - 1
        for k in range(1, kmax + 1):
            v = P @ v
            if k >= lo:
                acc = acc + w[k - lo] * v
        return acc

    m = log.count_until(t)
    eta = eta0.astype(float).copy()
    acc = np.zeros(g.num_vertices)
    s_prev = 0.0

    def integrate_interval(a: float, b: float, acc, s_prev, w_vec):
        if b <= a:
            return acc, s_prev
        nsub = max(1, math.ceil((b - a) / tol))
        h = (b - a) / nsub
        mids = a + (np.arange(nsub) + 0.5) * h
        for s_mid in mids:
            acc = propagate(acc, s_mid - s_prev)
            acc = acc + h * w_vec
            s_prev = s_mid
        return acc, s_prev

    eu, ev = log.edges[:, 0], log.edges[:, 1]
    for i in range(m):
        s = log.times[i]
        w_vec = -(L @ eta)  # minus compensator density d<M>: K(t-s) L eta(s)
        acc, s_prev = integrate_interval(s_prev, s, acc, s_prev, w_vec)
        acc = propagate(acc, s - s_prev)
        s_prev = s
        e = log.edge_ids[i]
        y, z = eu[e], ev[e]
        jump = eta[z] - eta[y]
        if jump != 0.0:
            acc[y] += jump
            acc[z] -= jump
            eta[y], eta[z] = eta[z], eta[y]
    w_vec = -(L @ eta)
    acc, s_prev = integrate_interval(s_prev, t, acc, s_prev, w_vec)
    acc = propagate(acc, t - s_prev)

    rhs = base + acc
    if not np.all(np.isfinite(rhs)):
        raise NumericalError("Duhamel quadrature produced nonfinite values")
    return float(np.max(np.abs(lhs - rhs)))
