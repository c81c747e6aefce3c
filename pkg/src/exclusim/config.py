"""Experiment configuration: plain-text format, validation, resolved configs.

Config files are line-oriented ``key = value`` pairs with dotted keys for
nesting and ``[a, b, c]`` lists; ``#`` starts a comment.  Unknown keys are
rejected with the offending line number.  Example::

    graph.dimension = 1
    graph.n = [64, 128, 256]
    field.kind = periodic
    field.pattern = [1, 2]
    phi = cosine:1
    rho0 = cosine:0.5,0.5,1
    t = 0.05
    delta = 0.05
    replicas = 200
    env_seeds = [0]
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field as dfield

import numpy as np

from .conductance import ConductanceField
from .errors import ConfigError
from .graphs import GraphInstance, TestFunction, build_torus_1d, build_torus_2d

__all__ = ["ProfileSpec", "ExperimentConfig", "parse_config", "parse_config_file"]


@dataclass(frozen=True)
class ProfileSpec:
    """Initial macroscopic density rho0 on the torus.

    kinds: constant(value) and cosine(mean, amplitude, k), the latter being
    mean + amplitude * cos(2 pi k u).  Values must stay inside [0, 1].
    """

    kind: str
    value: float = 0.5
    mean: float = 0.5
    amplitude: float = 0.5
    k: int = 1

    @staticmethod
    def constant(value: float) -> "ProfileSpec":
        return ProfileSpec(kind="constant", value=float(value))

    @staticmethod
    def cosine(mean: float, amplitude: float, k: int = 1) -> "ProfileSpec":
        return ProfileSpec(kind="cosine", mean=float(mean), amplitude=float(amplitude), k=int(k))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "constant":
            return np.full(pts.shape[0], self.value)
        return self.mean + self.amplitude * np.cos(2.0 * np.pi * self.k * pts[:, 0])

    def range_ok(self) -> bool:
        if self.kind == "constant":
            return 0.0 <= self.value <= 1.0
        return self.mean - abs(self.amplitude) >= 0.0 and self.mean + abs(self.amplitude) <= 1.0

    def paired_integral(self, phi: TestFunction, t: float, D: float) -> float | None:
        """Closed form of integral phi * (P_t rho0) dm when phi is a cosine mode."""
        if phi.kind == "constant":
            base = self.value if self.kind == "constant" else self.mean
            return phi.value * base
        if phi.kind != "cosine" or len(phi.k) != 1:
            return None
        kphi = abs(phi.k[0])
        if self.kind == "constant":
            return 0.0 if kphi != 0 else self.value
        if kphi == 0:
            return self.mean
        if kphi != abs(self.k):
            return 0.0
        return 0.5 * self.amplitude * math.exp(-4.0 * math.pi**2 * self.k**2 * D * t)


# key -> (type tag, default); None default means required
_SCHEMA: dict[str, tuple[str, object]] = {
    "graph.dimension": ("int", 1),
    "graph.n": ("int_list", None),
    "field.kind": ("str", "constant"),
    "field.value": ("float", 1.0),
    "field.pattern": ("float_list", [1.0]),
    "field.lo": ("float", 1.0),
    "field.hi": ("float", 2.0),
    "field.alpha": ("float", 2.0),
    "field.scale": ("float", 1.0),
    "phi": ("str", "cosine:1"),
    "rho0": ("str", "constant:0.5"),
    "t": ("float", 0.05),
    "delta": ("float", 0.05),
    "replicas": ("int", 200),
    "env_seeds": ("int_list", [0]),
    "tol": ("float", 1e-8),
    "diffusivity": ("str", "auto"),
    "compare_diffusivity": ("str", ""),
    "max_discrepancy": ("float", 0.02),
    "times": ("float_list", [0.05]),
    "mesh": ("int", 1024),
    "steps": ("int", 1024),
    "epsilon": ("float", 0.0),
    "x0": ("int", 0),
}


def _parse_scalar(token: str, line_no: int, key: str):
    token = token.strip()
    try:
        if token.lower() in ("true", "false"):
            return token.lower() == "true"
        if any(ch in token for ch in ".eE") and not token.lstrip("+-").isdigit():
            return float(token)
        return int(token)
    except ValueError:
        return token  # bare string


def _coerce(key: str, raw, line_no: int):
    tag, _ = _SCHEMA[key]
    def bad(expected):
        raise ConfigError(f"line {line_no}: key '{key}' expects {expected}, got {raw!r}")
    if tag == "int":
        if isinstance(raw, bool) or not isinstance(raw, int):
            bad("an integer")
        return raw
    if tag == "float":
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            bad("a number")
        return float(raw)
    if tag == "str":
        return str(raw)
    if tag == "int_list":
        if not isinstance(raw, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in raw):
            bad("a list of integers")
        return list(raw)
    if tag == "float_list":
        if not isinstance(raw, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw):
            bad("a list of numbers")
        return [float(x) for x in raw]
    raise ConfigError(f"internal schema error for key '{key}'")


def _parse_lines(text: str) -> dict[str, tuple[object, int]]:
    out: dict[str, tuple[object, int]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {line_no}: empty key")
        if key not in _SCHEMA:
            raise ConfigError(f"line {line_no}: unknown key '{key}'")
        if key in out:
            raise ConfigError(f"line {line_no}: duplicate key '{key}'")
        if value.startswith("["):
            if not value.endswith("]"):
                raise ConfigError(f"line {line_no}: unterminated list for key '{key}'")
            inner = value[1:-1].strip()
            items = [] if not inner else [
                _parse_scalar(tok, line_no, key) for tok in inner.split(",")
            ]
            out[key] = (items, line_no)
        else:
            out[key] = (_parse_scalar(value, line_no, key), line_no)
    return out


def _parse_test_function(spec: str, dimension: int) -> TestFunction:
    kind, _, args = spec.partition(":")
    kind = kind.strip()
    try:
        if kind == "cosine":
            ks = [int(a) for a in args.split(",")] if args else [1]
            if len(ks) == 1 and dimension == 2:
                ks = [ks[0], 0]
            return TestFunction.cosine_mode(*ks)
        if kind == "bump":
            parts = [float(a) for a in args.split(",")]
            *center, radius = parts
            if not center:
                center = [0.5] * dimension
            return TestFunction.bump(center, radius)
        if kind == "constant":
            return TestFunction.constant(float(args) if args else 1.0)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad test function spec '{spec}': {exc}") from exc
    raise ConfigError(f"unknown test function kind '{kind}'")


def _parse_profile(spec: str) -> ProfileSpec:
    kind, _, args = spec.partition(":")
    kind = kind.strip()
    try:
        if kind == "constant":
            return ProfileSpec.constant(float(args) if args else 0.5)
        if kind == "cosine":
            parts = [float(a) for a in args.split(",")] if args else [0.5, 0.5, 1]
            mean, amplitude = parts[0], parts[1]
            k = int(parts[2]) if len(parts) > 2 else 1
            return ProfileSpec.cosine(mean, amplitude, k)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad profile spec '{spec}': {exc}") from exc
    raise ConfigError(f"unknown profile kind '{kind}'")


@dataclass
class ExperimentConfig:
    """Resolved, validated experiment parameters."""

    dimension: int
    n_list: list[int]
    field_kind: str
    field_params: dict
    phi_spec: str
    rho0_spec: str
    t: float
    delta: float
    replicas: int
    env_seeds: list[int]
    tol: float
    diffusivity: str
    compare_diffusivity: str
    max_discrepancy: float
    times: list[float]
    mesh: int
    steps: int
    epsilon: float
    x0: int
    base_seed: int = 0
    threads: int = 1

    # ---- derived objects -------------------------------------------------
    def build_graph(self, n: int) -> GraphInstance:
        if self.dimension == 1:
            return build_torus_1d(n)
        return build_torus_2d(n)

    def field_for(self, env_seed: int) -> ConductanceField:
        p = self.field_params
        if self.field_kind == "constant":
            return ConductanceField.constant(p["value"])
        if self.field_kind == "periodic":
            return ConductanceField.periodic(p["pattern"])
        if self.field_kind == "iid_uniform":
            return ConductanceField.iid_uniform(p["lo"], p["hi"], seed=env_seed)
        if self.field_kind == "iid_pareto":
            return ConductanceField.iid_pareto(p["alpha"], p["scale"], seed=env_seed)
        raise ConfigError(f"unknown field kind '{self.field_kind}'")

    def phi(self) -> TestFunction:
        return _parse_test_function(self.phi_spec, self.dimension)

    def rho0(self) -> ProfileSpec:
        return _parse_profile(self.rho0_spec)

    # ---- provenance ------------------------------------------------------
    def canonical_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "dimension", "n_list", "field_kind", "field_params", "phi_spec",
            "rho0_spec", "t", "delta", "replicas", "env_seeds", "tol",
            "diffusivity", "compare_diffusivity", "max_discrepancy", "times",
            "mesh", "steps", "epsilon", "x0", "base_seed",
        )}
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def parse_config(text: str, base_seed: int = 0, threads: int = 1) -> ExperimentConfig:
    """Parse and validate a config file body."""
    parsed = _parse_lines(text)
    missing = [k for k, (_, default) in _SCHEMA.items()
               if default is None and k not in parsed]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(sorted(missing)))
    values: dict[str, object] = {}
    for key, (tag, default) in _SCHEMA.items():
        if key in parsed:
            raw, line_no = parsed[key]
            values[key] = _coerce(key, raw, line_no)
        else:
            values[key] = default

    n_list = values["graph.n"]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("graph.n: n-list must be strictly increasing")
    if any(n < 2 for n in n_list):
        raise ConfigError("graph.n: every n must be >= 2")
    if values["graph.dimension"] not in (1, 2):
        raise ConfigError("graph.dimension must be 1 or 2")
    if values["replicas"] < 2:
        raise ConfigError("replicas must be >= 2")
    if values["t"] <= 0:
        raise ConfigError("t must be positive")
    if values["delta"] <= 0:
        raise ConfigError("delta must be positive")
    if values["tol"] <= 0:
        raise ConfigError("tol must be positive")
    if values["field.kind"] not in ("constant", "periodic", "iid_uniform", "iid_pareto"):
        raise ConfigError(f"unknown field.kind '{values['field.kind']}'")
    diff = values["diffusivity"]
    if diff not in ("auto", "arithmetic"):
        try:
            float(diff)
        except ValueError:
            raise ConfigError("diffusivity must be 'auto', 'arithmetic', or a number")

    cfg = ExperimentConfig(
        dimension=values["graph.dimension"],
        n_list=list(n_list),
        field_kind=values["field.kind"],
        field_params={
            "value": values["field.value"],
            "pattern": values["field.pattern"],
            "lo": values["field.lo"],
            "hi": values["field.hi"],
            "alpha": values["field.alpha"],
            "scale": values["field.scale"],
        },
        phi_spec=values["phi"],
        rho0_spec=values["rho0"],
        t=values["t"],
        delta=values["delta"],
        replicas=values["replicas"],
        env_seeds=list(values["env_seeds"]),
        tol=values["tol"],
        diffusivity=str(diff),
        compare_diffusivity=values["compare_diffusivity"],
        max_discrepancy=values["max_discrepancy"],
        times=list(values["times"]),
        mesh=values["mesh"],
        steps=values["steps"],
        epsilon=values["epsilon"],
        x0=values["x0"],
        base_seed=int(base_seed),
        threads=int(threads),
    )
    # validate the derived objects early so errors surface at parse time
    cfg.phi()
    prof = cfg.rho0()
    if not prof.range_ok():
        raise ConfigError("rho0 must take values in [0, 1]")
    return cfg


def parse_config_file(path: str, base_seed: int = 0, threads: int = 1) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), base_seed=base_seed, threads=threads)
