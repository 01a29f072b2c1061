"""Post-processing: correlations, convergence scans, power-law scaling.

The resource scan finds, per lattice size, the smallest layer count whose
best run lands at or below the middle of the spectral gap (gap metric
<= 0.5), and the power-law fit turns those counts into an extrapolation
a * n**b via least squares on (ln n, ln y).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .ansatz import AnsatzSpec, ResourceCount, ansatz_resources
from .lattice import build_lattice
from .pauli import PauliString, _check_state, apply_string
from .simulator import StateVector
from .vqe import VqeRunRecord

SCAN_METRIC_THRESHOLD = 0.5


class Axis(Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


@dataclass
class CorrelationMatrix:
    """Symmetric n x n matrix of <sigma^a_i sigma^a_j>, unit diagonal."""

    values: np.ndarray
    axis: Axis


def correlation_matrix(psi: StateVector, axis: Axis) -> CorrelationMatrix:
    """Spin-spin correlations of a normalized state along one axis.

    Diagonal entries are 1 by construction (sigma squared is the identity).
    """
    _check_state(psi.n_qubits, psi)
    n = psi.n_qubits
    amps = psi.amplitudes
    values = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            string = PauliString.from_ops({i: axis.value, j: axis.value}, n)
            corr = float(np.real(np.vdot(amps, apply_string(string, amps))))
            values[i, j] = values[j, i] = corr
    return CorrelationMatrix(values=values, axis=axis)


@dataclass(frozen=True)
class ScanPoint:
    n_qubits: int
    min_layers: int
    min_two_qubit_gates: int
    min_params: int


def _record_resources(record: VqeRunRecord) -> ResourceCount:
    cfg = record.config
    lat = build_lattice(cfg.rows, cfg.cols, cfg.boundary)
    return ansatz_resources(AnsatzSpec(lat, cfg.n_layers, cfg.include_diagonals))


def min_resources_scan(records: Iterable[VqeRunRecord]) -> list[ScanPoint]:
    """Smallest converged layer count (metric <= 0.5) per lattice size.

    Sizes where no run reaches the threshold are dropped with a warning.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to scan")
    by_size: dict[int, list[VqeRunRecord]] = {}
    for rec in records:
        by_size.setdefault(rec.config.n_qubits, []).append(rec)
    points: list[ScanPoint] = []
    for n_qubits in sorted(by_size):
        best_per_layers: dict[int, float] = {}
        for rec in by_size[n_qubits]:
            layers = rec.config.n_layers
            best_per_layers[layers] = min(
                best_per_layers.get(layers, np.inf), rec.metric
            )
        qualifying = [
            layers
            for layers, metric in best_per_layers.items()
            if metric <= SCAN_METRIC_THRESHOLD
        ]
        if not qualifying:
            warnings.warn(
                f"no run on {n_qubits} qubits reached gap metric <= "
                f"{SCAN_METRIC_THRESHOLD}; size omitted from the scan",
                stacklevel=2,
            )
            continue
        min_layers = min(qualifying)
        rec = next(
            r
            for r in by_size[n_qubits]
            if r.config.n_layers == min_layers
            and r.metric == best_per_layers[min_layers]
        )
        res = _record_resources(rec)
        points.append(
            ScanPoint(
                n_qubits=n_qubits,
                min_layers=min_layers,
                min_two_qubit_gates=res.two_qubit_gates,
                min_params=res.n_params,
            )
        )
    return points


@dataclass(frozen=True)
class PowerLawFit:
    """y = prefactor * n**exponent; residual is the RMS log-space misfit."""

    prefactor: float
    exponent: float
    residual: float


def power_law_fit(points: Sequence[tuple[float, float]]) -> PowerLawFit:
    """Least-squares power law through (n, y) points, fitted in log-log space."""
    if len(points) < 2:
        raise ValueError(f"need at least 2 points, got {len(points)}")
    ns = np.array([p[0] for p in points], dtype=np.float64)
    ys = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(ns <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit needs strictly positive coordinates")
    if len(np.unique(ns)) != len(ns):
        raise ValueError("n coordinates must be distinct")
    log_n = np.log(ns)
    log_y = np.log(ys)
    slope, intercept = np.polyfit(log_n, log_y, 1)
    misfit = log_y - (slope * log_n + intercept)
    residual = float(np.sqrt(np.mean(misfit**2)))
    return PowerLawFit(
        prefactor=float(np.exp(intercept)), exponent=float(slope), residual=residual
    )


def extrapolate(fit: PowerLawFit, n: float) -> float:
    """Evaluate the fitted power law at size n."""
    if n <= 0:
        raise ValueError(f"extrapolation size must be positive, got {n}")
    return fit.prefactor * n**fit.exponent
