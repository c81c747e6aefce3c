"""Command-line interface: config parsing, dispatch, serialized reports.

Subcommands: gen-graph, simulate, kernel, pde, duality, homogenize, hydro.
Global flags: --config PATH, --seed U64, --out DIR, --threads N, --json.
EXCLUSIM_THREADS is the fallback for --threads.  Exit codes: 0 all pass,
2 a pass-flag failed, 1 error.  All output files are written atomically
(temp file + rename) and contain no timestamps, so equal manifests yield
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .conductance import assign
from .config import ExperimentConfig, parse_config_file
from .errors import ExclusimError
from .experiments import (
    ExperimentReport,
    duality_experiment,
    homogenization_experiment,
    hydro_experiment,
)
from .harris import component_statistics, evolve_exclusion, sample_clocks, sample_product_measure
from .kernel import transition_matrix
from .pde import DensityProfile, heat_solve
from .experiments import _diffusivity, _seed

__all__ = ["main", "dispatch", "RunManifest"]


@dataclass
class RunManifest:
    subcommand: str
    config_path: str
    config: ExperimentConfig
    base_seed: int
    out_dir: str
    timestamp: str  # informational only; never written into reports

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "config_path": self.config_path,
            "resolved_config": self.config.canonical_dict(),
            "base_seed": self.base_seed,
            "out_dir": self.out_dir,
            "timestamp": self.timestamp,
        }


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def _write_report(report: ExperimentReport, out_dir: str) -> None:
    _atomic_write(os.path.join(out_dir, "report.json"), _json_bytes(report.to_dict()))
    csv = "\n".join(report.csv_lines()) + "\n"
    _atomic_write(os.path.join(out_dir, "report.csv"), csv.encode())


def _cmd_gen_graph(m: RunManifest) -> int:
    cfg = m.config
    for n in cfg.n_list:
        g = assign(cfg.field_for(cfg.env_seeds[0]), cfg.build_graph(n))
        suffix = f"_n{n}" if len(cfg.n_list) > 1 else ""
        header = "id,x" if g.dimension == 1 else "id,x,y"
        lines = [header]
        for i in range(g.num_vertices):
            coords = ",".join(repr(c) for c in g.positions[i])
            lines.append(f"{i},{coords}")
        _atomic_write(os.path.join(m.out_dir, f"vertices{suffix}.csv"),
                      ("\n".join(lines) + "\n").encode())
        lines = ["u,v,conductance"]
        for (u, v), c in zip(g.edges, g.conductance):
            lines.append(f"{u},{v},{c!r}")
        _atomic_write(os.path.join(m.out_dir, f"edges{suffix}.csv"),
                      ("\n".join(lines) + "\n").encode())
    return 0


def _cmd_simulate(m: RunManifest) -> int:
    cfg = m.config
    n = cfg.n_list[-1]
    env_seed = cfg.env_seeds[0]
    g = assign(cfg.field_for(env_seed), cfg.build_graph(n))
    horizon = max(cfg.times)
    log = sample_clocks(g, horizon, seed=_seed(cfg, "simulate-clocks", n, env_seed, 0))
    eta0 = sample_product_measure(g, cfg.rho0(), seed=_seed(cfg, "simulate-init", n, env_seed, 0))
    lines = ["time,vertex,occupancy"]
    for t in cfg.times:
        eta = evolve_exclusion(eta0, log, t)
        for x in range(g.num_vertices):
            lines.append(f"{t!r},{x},{int(eta[x])}")
    _atomic_write(os.path.join(m.out_dir, "trajectory.csv"), ("\n".join(lines) + "\n").encode())
    eps = cfg.epsilon if cfg.epsilon > 0 else min(1.0 / g.b_n, horizon)
    stats = component_statistics(log, eps)
    summary = {
        "schema_version": 1,
        "num_events": log.num_events,
        "max_component_size": stats.max_size,
        "component_histogram": {str(k): v for k, v in sorted(stats.histogram.items())},
        "window_length": eps,
        "num_windows": stats.num_windows,
        "config_hash": cfg.config_hash(),
    }
    _atomic_write(os.path.join(m.out_dir, "events_summary.json"), _json_bytes(summary))
    return 0


def _cmd_kernel(m: RunManifest) -> int:
    cfg = m.config
    n = cfg.n_list[-1]
    g = assign(cfg.field_for(cfg.env_seeds[0]), cfg.build_graph(n))
    worst_asym = 0.0
    worst_row = 0.0
    for t in cfg.times:
        kern = transition_matrix(g, t, tol=cfg.tol)
        worst_asym = max(worst_asym, kern.max_asymmetry())
        worst_row = max(worst_row, kern.row_sum_deviation())
        suffix = f"_t{t}" if len(cfg.times) > 1 else ""
        lines = ["x,y,p"]
        for x in range(g.num_vertices):
            for y in range(g.num_vertices):
                lines.append(f"{x},{y},{kern.matrix[x, y]!r}")
        _atomic_write(os.path.join(m.out_dir, f"kernel{suffix}.csv"),
                      ("\n".join(lines) + "\n").encode())
    checks = {
        "schema_version": 1,
        "max_asymmetry": worst_asym,
        "worst_row_sum_deviation": worst_row,
        "config_hash": cfg.config_hash(),
    }
    _atomic_write(os.path.join(m.out_dir, "kernel_checks.json"), _json_bytes(checks))
    return 0


def _cmd_pde(m: RunManifest) -> int:
    cfg = m.config
    g = assign(cfg.field_for(cfg.env_seeds[0]), cfg.build_graph(cfg.n_list[-1]))
    D = _diffusivity(cfg, g)
    profile = DensityProfile.from_function(cfg.rho0(), cfg.mesh)
    lines = ["time,mesh_point,value"]
    for t in sorted(set([0.0] + cfg.times)):
        evolved = heat_solve(profile, D, t, cfg.steps) if t > 0 else profile
        for j, v in zip(evolved.mesh, evolved.values):
            lines.append(f"{t!r},{j!r},{v!r}")
    _atomic_write(os.path.join(m.out_dir, "profile.csv"), ("\n".join(lines) + "\n").encode())
    return 0


_EXPERIMENTS = {
    "duality": duality_experiment,
    "homogenize": homogenization_experiment,
    "hydro": hydro_experiment,
}


def dispatch(manifest: RunManifest) -> int:
    """Run the named subcommand; returns the process exit code."""
    os.makedirs(manifest.out_dir, exist_ok=True)
    _atomic_write(os.path.join(manifest.out_dir, "manifest.json"),
                  _json_bytes(manifest.to_dict()))
    if manifest.subcommand in _EXPERIMENTS:
        report = _EXPERIMENTS[manifest.subcommand](manifest.config)
        _write_report(report, manifest.out_dir)
        return 0 if report.passed else 2
    runner = {
        "gen-graph": _cmd_gen_graph,
        "simulate": _cmd_simulate,
        "kernel": _cmd_kernel,
        "pde": _cmd_pde,
    }[manifest.subcommand]
    return runner(manifest)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exclusim",
        description="Symmetric exclusion process simulator and verification harness",
        epilog="Config format: 'key = value' lines with dotted keys and [a, b] "
               "lists; see the package README for the full key table and defaults "
               "(t=0.05, delta=0.05, replicas=200, field.kind=constant, ...).",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the experiment config file")
    common.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    common.add_argument("--out", default="out", help="output directory (default ./out)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: EXCLUSIM_THREADS or 1)")
    common.add_argument("--json", action="store_true", dest="json_output",
                        help="print the report JSON to stdout")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, doc in [
        ("gen-graph", "dump vertices.csv and edges.csv for the configured graphs"),
        ("simulate", "run one exclusion trajectory; write snapshots and event summary"),
        ("kernel", "compute dense transition kernels and symmetry checks"),
        ("pde", "solve the limit heat equation; write profile.csv"),
        ("duality", "duality/replacement experiment against the martingale bound"),
        ("homogenize", "homogenization discrepancy across the graph sequence"),
        ("hydro", "hydrodynamic-limit exceedance probability experiment"),
    ]:
        sub.add_parser(name, parents=[common], help=doc)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("EXCLUSIM_THREADS", "1"))
    try:
        cfg = parse_config_file(args.config, base_seed=args.seed, threads=threads)
        manifest = RunManifest(
            subcommand=args.subcommand,
            config_path=os.path.abspath(args.config),
            config=cfg,
            base_seed=args.seed,
            out_dir=args.out,
            timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        )
        code = dispatch(manifest)
    except ExclusimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    if args.json_output and manifest.subcommand in _EXPERIMENTS:
        report_path = os.path.join(manifest.out_dir, "report.json")
        with open(report_path, "r", encoding="utf-8") as fh:
            print(fh.read(), end="")
    return code


if __name__ == "__main__":
    sys.exit(main())
