"""Experiment runner: config parsing, execution, persistence.

One YAML config describes a batch of VQE runs plus output and analysis
settings. Each run produces a JSON record (schema-versioned, lossless) and
a two-column CSV trace (`eval,energy`) for plotting convergence; the batch
produces a summary table with the exact energies, the achieved energy and
the gap metric per run.

Subcommands: `run` (execute a config), `spectrum` (exact baseline only),
`resources` (gate/parameter counts for an ansatz), `fit` (power law over a
scan file).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .analysis import Axis, correlation_matrix, extrapolate, power_law_fit
from .ansatz import AnsatzSpec, ansatz_resources, build_ansatz
from .lattice import Boundary, build_lattice
from .optimizer import HopConfig, LocalConfig
from .pauli import build_hamiltonian
from .simulator import run_circuit
from .spectrum import lowest_two
from .vqe import TwoStageConfig, VqeConfig, VqeRunRecord, vqe_run

RECORD_SCHEMA_VERSION = 1
WORKERS_ENV_VAR = "J1J2VQE_WORKERS"


class ConfigError(ValueError):
    """Invalid experiment config; the message names the offending field."""


@dataclass
class ExperimentConfig:
    entries: list[tuple[str, VqeConfig]]
    output_dir: Path
    seed: int = 0
    workers: int = 1
    correlations: bool = False
    scan: bool = False
    fit: bool = False
    analysis_axis: Axis = Axis.X


# -- config parsing ----------------------------------------------------------


def _require(mapping: dict, key: str, kind, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required field '{key}'")
    return _convert(mapping[key], kind, f"{where}.{key}")


def _convert(value, kind, where: str):
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    raise TypeError(f"unsupported kind {kind}")


def _positive(value: int, where: str) -> int:
    if value < 1:
        raise ConfigError(f"{where}: must be a positive integer, got {value}")
    return value


def _parse_boundary(raw: str, where: str) -> Boundary:
    try:
        return Boundary(raw)
    except ValueError:
        choices = ", ".join(b.value for b in Boundary)
        raise ConfigError(f"{where}: unknown boundary {raw!r} (choose {choices})")


def _parse_run_entry(raw: Any, index: int, base_seed: int) -> tuple[str, VqeConfig]:
    where = f"runs[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(raw).__name__}")
    known = {
        "name", "rows", "cols", "boundary", "j1", "j2", "n_layers",
        "include_diagonals", "budget", "rho_begin", "rho_end", "seed",
        "restarts", "basin_hops", "step_size", "temperature", "two_stage",
    }
    for key in raw:
        if key not in known:
            raise ConfigError(f"{where}: unknown field '{key}'")
    rows = _positive(_require(raw, "rows", int, where), f"{where}.rows")
    cols = _positive(_require(raw, "cols", int, where), f"{where}.cols")
    n_layers = _positive(_require(raw, "n_layers", int, where), f"{where}.n_layers")
    boundary = _parse_boundary(
        _convert(raw.get("boundary", "open"), str, f"{where}.boundary"),
        f"{where}.boundary",
    )
    budget = _convert(raw.get("budget", 100_000), int, f"{where}.budget")
    if budget < 0:
        raise ConfigError(f"{where}.budget: must be >= 0, got {budget}")
    local = LocalConfig(
        rho_begin=_convert(raw.get("rho_begin", 1.0), float, f"{where}.rho_begin"),
        rho_end=_convert(raw.get("rho_end", 1e-6), float, f"{where}.rho_end"),
        max_evals=budget,
    )
    hops = None
    n_hops = _convert(raw.get("basin_hops", 0), int, f"{where}.basin_hops")
    if n_hops < 0:
        raise ConfigError(f"{where}.basin_hops: must be >= 0, got {n_hops}")
    if n_hops > 0:
        hops = HopConfig(
            n_hops=n_hops,
            step_size=_convert(raw.get("step_size", 0.5), float, f"{where}.step_size"),
            temperature=_convert(
                raw.get("temperature", 1.0), float, f"{where}.temperature"
            ),
            seed=None,
        )
    two_stage = None
    if "two_stage" in raw:
        ts_raw = raw["two_stage"]
        ts_where = f"{where}.two_stage"
        if not isinstance(ts_raw, dict):
            raise ConfigError(f"{ts_where}: expected a mapping")
        pre = _positive(_require(ts_raw, "pre_layers", int, ts_where), f"{ts_where}.pre_layers")
        if pre >= n_layers:
            raise ConfigError(
                f"{ts_where}.pre_layers: must be smaller than n_layers ({n_layers})"
            )
        two_stage = TwoStageConfig(
            pre_layers=pre,
            epsilon=_convert(ts_raw.get("epsilon", 1e-5), float, f"{ts_where}.epsilon"),
        )
    seed = _convert(raw.get("seed", base_seed + index), int, f"{where}.seed")
    restarts = _convert(raw.get("restarts", 1), int, f"{where}.restarts")
    name = _convert(raw.get("name", f"run{index:03d}"), str, f"{where}.name")
    try:
        cfg = VqeConfig(
            rows=rows,
            cols=cols,
            boundary=boundary,
            j1=_convert(raw.get("j1", -1.0), float, f"{where}.j1"),
            j2=_convert(raw.get("j2", -0.5), float, f"{where}.j2"),
            n_layers=n_layers,
            include_diagonals=_convert(
                raw.get("include_diagonals", True), bool, f"{where}.include_diagonals"
            ),
            local=local,
            hops=hops,
            seed=seed,
            restarts=_positive(restarts, f"{where}.restarts"),
            two_stage=two_stage,
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return name, cfg


def parse_experiment_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a YAML experiment config."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    known = {"runs", "output_dir", "seed", "workers", "analysis"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown top-level field '{key}'")
    base_seed = _convert(raw.get("seed", 0), int, "seed")
    runs_raw = raw.get("runs", [])
    if not isinstance(runs_raw, list):
        raise ConfigError("runs: expected a list of run entries")
    entries = [
        _parse_run_entry(entry, i, base_seed) for i, entry in enumerate(runs_raw)
    ]
    names = [name for name, _ in entries]
    if len(set(names)) != len(names):
        raise ConfigError("runs: entry names must be unique")
    analysis_raw = raw.get("analysis", {})
    if not isinstance(analysis_raw, dict):
        raise ConfigError("analysis: expected a mapping")
    axis_raw = _convert(analysis_raw.get("axis", "X"), str, "analysis.axis").upper()
    try:
        axis = Axis(axis_raw)
    except ValueError:
        raise ConfigError(f"analysis.axis: unknown axis {axis_raw!r}")
    return ExperimentConfig(
        entries=entries,
        output_dir=Path(raw.get("output_dir", "runs")),
        seed=base_seed,
        workers=_positive(_convert(raw.get("workers", 1), int, "workers"), "workers"),
        correlations=_convert(
            analysis_raw.get("correlations", False), bool, "analysis.correlations"
        ),
        scan=_convert(analysis_raw.get("scan", False), bool, "analysis.scan"),
        fit=_convert(analysis_raw.get("fit", False), bool, "analysis.fit"),
        analysis_axis=axis,
    )


# -- record persistence ------------------------------------------------------


def _config_to_dict(cfg: VqeConfig) -> dict:
    d: dict[str, Any] = {
        "rows": cfg.rows,
        "cols": cfg.cols,
        "boundary": cfg.boundary.value,
        "j1": cfg.j1,
        "j2": cfg.j2,
        "n_layers": cfg.n_layers,
        "include_diagonals": cfg.include_diagonals,
        "rho_begin": cfg.local.rho_begin,
        "rho_end": cfg.local.rho_end,
        "budget": cfg.local.max_evals,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
    }
    if cfg.hops is not None:
        d["hops"] = {
            "n_hops": cfg.hops.n_hops,
            "step_size": cfg.hops.step_size,
            "temperature": cfg.hops.temperature,
            "seed": cfg.hops.seed,
        }
    if cfg.two_stage is not None:
        d["two_stage"] = {
            "pre_layers": cfg.two_stage.pre_layers,
            "epsilon": cfg.two_stage.epsilon,
            "stage1_fraction": cfg.two_stage.stage1_fraction,
        }
    return d


def _config_from_dict(d: dict) -> VqeConfig:
    hops = None
    if "hops" in d:
        h = d["hops"]
        hops = HopConfig(
            n_hops=h["n_hops"],
            step_size=h["step_size"],
            temperature=h["temperature"],
            seed=h["seed"],
        )
    two_stage = None
    if "two_stage" in d:
        t = d["two_stage"]
        two_stage = TwoStageConfig(
            pre_layers=t["pre_layers"],
            epsilon=t["epsilon"],
            stage1_fraction=t["stage1_fraction"],
        )
    return VqeConfig(
        rows=d["rows"],
        cols=d["cols"],
        boundary=Boundary(d["boundary"]),
        j1=d["j1"],
        j2=d["j2"],
        n_layers=d["n_layers"],
        include_diagonals=d["include_diagonals"],
        local=LocalConfig(
            rho_begin=d["rho_begin"], rho_end=d["rho_end"], max_evals=d["budget"]
        ),
        hops=hops,
        seed=d["seed"],
        restarts=d["restarts"],
        two_stage=two_stage,
    )


def record_to_dict(record: VqeRunRecord) -> dict:
    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "config": _config_to_dict(record.config),
        "trace": [[i, e] for i, e in record.trace],
        "stage_starts": list(record.stage_starts),
        "best_params": [float(p) for p in record.best_params],
        "e_bar": record.e_bar,
        "e0": record.e0,
        "e1": record.e1,
        "metric": record.metric,
        "wall_time": record.wall_time,
    }


def record_from_dict(d: dict) -> VqeRunRecord:
    version = d.get("schema_version")
    if version != RECORD_SCHEMA_VERSION:
        raise ValueError(f"unsupported record schema version {version!r}")
    return VqeRunRecord(
        config=_config_from_dict(d["config"]),
        trace=[(int(i), float(e)) for i, e in d["trace"]],
        stage_starts=tuple(d["stage_starts"]),
        best_params=np.array(d["best_params"], dtype=np.float64),
        e_bar=d["e_bar"],
        e0=d["e0"],
        e1=d["e1"],
        metric=d["metric"],
        wall_time=d["wall_time"],
    )


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_record(path: str | Path, record: VqeRunRecord) -> None:
    _atomic_write(Path(path), json.dumps(record_to_dict(record), indent=1))


def load_record(path: str | Path) -> VqeRunRecord:
    return record_from_dict(json.loads(Path(path).read_text()))


def save_trace(path: str | Path, trace: list[tuple[int, float]]) -> None:
    lines = ["eval,energy"]
    lines.extend(f"{i},{e!r}" for i, e in trace)
    _atomic_write(Path(path), "\n".join(lines) + "\n")


# -- experiment execution ----------------------------------------------------


def _run_entry(item: tuple[str, VqeConfig]) -> tuple[str, VqeRunRecord]:
    name, cfg = item
    return name, vqe_run(cfg)


def _summary_rows(results: list[tuple[str, VqeRunRecord]]) -> list[dict]:
    rows = []
    for name, rec in results:
        rows.append(
            {
                "name": name,
                "n_qubits": rec.config.n_qubits,
                "j2": rec.config.j2,
                "n_layers": rec.config.n_layers,
                "e0": rec.e0,
                "e1": rec.e1,
                "e_bar": rec.e_bar,
                "metric": rec.metric,
                "n_evals": rec.n_evals,
            }
        )
    return rows


def _write_summary(path: Path, rows: list[dict]) -> None:
    headers = ["name", "n_qubits", "j2", "n_layers", "e0", "e1", "e_bar", "metric", "n_evals"]
    out = [",".join(headers)]
    for row in rows:
        out.append(
            ",".join(
                repr(row[h]) if isinstance(row[h], float) else str(row[h])
                for h in headers
            )
        )
    _atomic_write(path, "\n".join(out) + "\n")


def _print_summary(rows: list[dict]) -> None:
    if not rows:
        print("no runs")
        return
    print(f"{'name':<20} {'qubits':>6} {'J2':>6} {'layers':>6} "
          f"{'E0':>12} {'E1':>12} {'E_bar':>12} {'metric':>8}")
    for row in rows:
        print(
            f"{row['name']:<20} {row['n_qubits']:>6} {row['j2']:>6.2f} "
            f"{row['n_layers']:>6} {row['e0']:>12.6f} {row['e1']:>12.6f} "
            f"{row['e_bar']:>12.6f} {row['metric']:>8.4f}"
        )


def run_experiment(
    config_path: str | Path,
    out_dir: str | Path | None = None,
    seed: int | None = None,
    workers: int | None = None,
    budget: int | None = None,
) -> int:
    """Execute a config; returns a process exit status (0 = full success)."""
    try:
        exp = parse_experiment_config(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if out_dir is not None:
        exp.output_dir = Path(out_dir)
    if seed is not None:
        exp = _reseed(exp, seed)
    if budget is not None:
        exp.entries = [
            (name, _replace_budget(cfg, budget)) for name, cfg in exp.entries
        ]
    n_workers = _resolve_workers(exp.workers if workers is None else workers)

    exp.output_dir.mkdir(parents=True, exist_ok=True)
    results: list[tuple[str, VqeRunRecord]] = []
    failures: list[tuple[str, str]] = []
    if n_workers == 1 or len(exp.entries) <= 1:
        for item in exp.entries:
            try:
                results.append(_run_entry(item))
            except Exception as exc:
                failures.append((item[0], str(exc)))
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = {pool.submit(_run_entry, item): item[0] for item in exp.entries}
            for future, name in futures.items():
                try:
                    results.append(future.result())
                except Exception as exc:
                    failures.append((name, str(exc)))

    order = {name: i for i, (name, _) in enumerate(exp.entries)}
    results.sort(key=lambda pair: order[pair[0]])
    for name, rec in results:
        save_record(exp.output_dir / f"{name}.json", rec)
        save_trace(exp.output_dir / f"{name}.trace.csv", rec.trace)
        if exp.correlations:
            _write_correlations(exp, name, rec)
    rows = _summary_rows(results)
    _write_summary(exp.output_dir / "summary.csv", rows)
    _print_summary(rows)
    if exp.scan and results:
        _write_scan_and_fit(exp, [rec for _, rec in results])
    for name, message in failures:
        print(f"FAILED {name}: {message}", file=sys.stderr)
    return 0 if not failures else 1


def _reseed(exp: ExperimentConfig, seed: int) -> ExperimentConfig:
    from dataclasses import replace as dc_replace

    exp.seed = seed
    exp.entries = [
        (name, dc_replace(cfg, seed=seed + i))
        for i, (name, cfg) in enumerate(exp.entries)
    ]
    return exp


def _replace_budget(cfg: VqeConfig, budget: int) -> VqeConfig:
    from dataclasses import replace as dc_replace

    return dc_replace(cfg, local=dc_replace(cfg.local, max_evals=budget))


def _resolve_workers(configured: int) -> int:
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}")
        if value < 1:
            raise ValueError(f"{WORKERS_ENV_VAR} must be >= 1, got {value}")
        return value
    return configured


def _write_correlations(exp: ExperimentConfig, name: str, rec: VqeRunRecord) -> None:
    cfg = rec.config
    lat = build_lattice(cfg.rows, cfg.cols, cfg.boundary)
    circ = build_ansatz(AnsatzSpec(lat, cfg.n_layers, cfg.include_diagonals))
    psi = run_circuit(circ, rec.best_params)
    corr = correlation_matrix(psi, exp.analysis_axis)
    lines = [",".join(repr(v) for v in row) for row in corr.values]
    _atomic_write(
        exp.output_dir / f"{name}.corr_{exp.analysis_axis.value.lower()}.csv",
        "\n".join(lines) + "\n",
    )


def _write_scan_and_fit(exp: ExperimentConfig, records: list[VqeRunRecord]) -> None:
    from .analysis import min_resources_scan

    points = min_resources_scan(records)
    lines = ["n_qubits,min_layers,min_two_qubit_gates,min_params"]
    lines.extend(
        f"{p.n_qubits},{p.min_layers},{p.min_two_qubit_gates},{p.min_params}"
        for p in points
    )
    _atomic_write(exp.output_dir / "scan.csv", "\n".join(lines) + "\n")
    if exp.fit and len(points) >= 2:
        fit = power_law_fit([(p.n_qubits, p.min_two_qubit_gates) for p in points])
        print(
            f"two-qubit gate scaling: {fit.prefactor:.4g} * n^{fit.exponent:.4g} "
            f"(log residual {fit.residual:.2e})"
        )


# -- argparse front end ------------------------------------------------------


def _cmd_run(args: argparse.Namespace) -> int:
    return run_experiment(
        args.config,
        out_dir=args.out,
        seed=args.seed,
        workers=args.workers,
        budget=args.budget,
    )


def _cmd_spectrum(args: argparse.Namespace) -> int:
    boundary = Boundary.PERIODIC if args.periodic else Boundary.OPEN
    lat = build_lattice(args.rows, args.cols, boundary)
    ham = build_hamiltonian(lat, args.j1, args.j2)
    res = lowest_two(ham)
    print(f"n_qubits = {lat.n_sites}")
    print(f"E0 = {res.e0:.6f}")
    print(f"E1 = {res.e1:.6f}")
    print(f"gap = {res.e1 - res.e0:.6f}  ({res.method.value} path)")
    return 0


def _cmd_resources(args: argparse.Namespace) -> int:
    boundary = Boundary.PERIODIC if args.periodic else Boundary.OPEN
    lat = build_lattice(args.rows, args.cols, boundary)
    res = ansatz_resources(
        AnsatzSpec(lat, args.layers, not args.no_diagonals)
    )
    print(f"two_qubit_gates           = {res.two_qubit_gates}")
    print(f"single_qubit_gates_total  = {res.single_qubit_gates_total}")
    print(f"single_qubit_gates_excl_z = {res.single_qubit_gates_excl_z}")
    print(f"n_params                  = {res.n_params}")
    print(f"n_layers                  = {res.n_layers}")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    points = []
    with open(args.scan_file, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or len(reader.fieldnames) < 2:
            print("fit: scan file needs a header and two columns", file=sys.stderr)
            return 2
        x_col, y_col = reader.fieldnames[0], args.column or reader.fieldnames[1]
        for row in reader:
            points.append((float(row[x_col]), float(row[y_col])))
    fit = power_law_fit(points)
    print(f"y = {fit.prefactor:.6g} * n^{fit.exponent:.6g}")
    print(f"log-space RMS residual = {fit.residual:.3e}")
    if args.extrapolate is not None:
        value = extrapolate(fit, args.extrapolate)
        print(f"extrapolated y({args.extrapolate:g}) = {value:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="j1j2vqe",
        description="VQE experiments for the 2D J1-J2 Heisenberg model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the runs in a YAML config")
    p_run.add_argument("--config", required=True, help="experiment config path")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--seed", type=int, default=None, help="global seed override")
    p_run.add_argument("--workers", type=int, default=None,
                       help=f"worker processes (env {WORKERS_ENV_VAR} wins)")
    p_run.add_argument("--budget", type=int, default=None,
                       help="evaluation budget override for every run")
    p_run.set_defaults(func=_cmd_run)

    p_spec = sub.add_parser("spectrum", help="exact two lowest energies")
    p_spec.add_argument("--rows", type=int, required=True)
    p_spec.add_argument("--cols", type=int, required=True)
    p_spec.add_argument("--periodic", action="store_true")
    p_spec.add_argument("--j1", type=float, default=-1.0)
    p_spec.add_argument("--j2", type=float, default=-0.5)
    p_spec.set_defaults(func=_cmd_spectrum)

    p_res = sub.add_parser("resources", help="ansatz gate and parameter counts")
    p_res.add_argument("--rows", type=int, required=True)
    p_res.add_argument("--cols", type=int, required=True)
    p_res.add_argument("--periodic", action="store_true")
    p_res.add_argument("--layers", type=int, required=True)
    p_res.add_argument("--no-diagonals", action="store_true")
    p_res.set_defaults(func=_cmd_resources)

    p_fit = sub.add_parser("fit", help="power-law fit over a scan CSV")
    p_fit.add_argument("--scan-file", required=True)
    p_fit.add_argument("--column", default=None,
                       help="y column name (default: second column)")
    p_fit.add_argument("--extrapolate", type=float, default=None,
                       help="also evaluate the fit at this size")
    p_fit.set_defaults(func=_cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
