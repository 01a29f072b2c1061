"""Derivative-free optimization: COBYLA local search plus basin hopping.

The local minimizer is COBYLA (Powell's linear-approximation trust-region
method, which maintains a simplex of m + 1 interpolation points and shrinks
the trust radius from rho_begin to rho_end), called through SciPy with a
hard evaluation budget enforced on our side. The global wrapper displaces
every coordinate of the accepted point by an independent uniform draw from
[-step_size, +step_size], re-minimizes locally, and accepts by a Metropolis
rule; the best point ever evaluated is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import minimize

Objective = Callable[[np.ndarray], float]

DEFAULT_RHO_BEGIN = 1.0
DEFAULT_RHO_END = 1e-6
DEFAULT_MAX_EVALS = 100_000


class OptStatus(Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class LocalResult:
    x_best: np.ndarray
    f_best: float
    n_evals: int
    status: OptStatus


@dataclass(frozen=True)
class LocalConfig:
    """COBYLA settings: initial/final trust radius and evaluation budget."""

    rho_begin: float = DEFAULT_RHO_BEGIN
    rho_end: float = DEFAULT_RHO_END
    max_evals: int = DEFAULT_MAX_EVALS


@dataclass(frozen=True)
class HopConfig:
    """Basin-hopping settings.

    temperature = 0 always rejects uphill moves; seed None defers seeding
    to the caller (the VQE driver derives it from the run seed).
    """

    n_hops: int = 10
    step_size: float = 0.5
    temperature: float = 1.0
    seed: int | None = 0

    def __post_init__(self) -> None:
        if self.n_hops < 0:
            raise ValueError(f"n_hops must be >= 0, got {self.n_hops}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")


class _BudgetExhausted(Exception):
    pass


class _CountingObjective:
    """Wraps the objective with budget enforcement and best-point tracking."""

    def __init__(self, f: Objective, max_evals: int):
        self.f = f
        self.max_evals = max_evals
        self.n_evals = 0
        self.x_best: np.ndarray | None = None
        self.f_best = math.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.n_evals >= self.max_evals:
            raise _BudgetExhausted
        value = float(self.f(np.asarray(x, dtype=np.float64)))
        self.n_evals += 1
        if not math.isfinite(value):
            raise ValueError(
                f"objective returned non-finite value {value!r} at evaluation "
                f"{self.n_evals}"
            )
        if value < self.f_best:
            self.f_best = value
            self.x_best = np.array(x, dtype=np.float64)
        return value


def cobyla_minimize(
    f: Objective,
    x0: np.ndarray,
    rho_begin: float = DEFAULT_RHO_BEGIN,
    rho_end: float = DEFAULT_RHO_END,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> LocalResult:
    """Minimize f from x0 with COBYLA, unconstrained.

    Deterministic for fixed inputs. Terminates when the trust radius
    reaches rho_end (CONVERGED) or after exactly max_evals objective
    evaluations (BUDGET_EXHAUSTED). The returned point is the best ever
    evaluated, so f_best <= f(x0) always holds.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1 or x0.size < 1:
        raise ValueError(f"x0 must be a 1-d vector, got shape {x0.shape}")
    if not rho_begin > rho_end > 0:
        raise ValueError(
            f"need rho_begin > rho_end > 0, got {rho_begin}, {rho_end}"
        )
    if max_evals < 1:
        raise ValueError(f"max_evals must be >= 1, got {max_evals}")
    counting = _CountingObjective(f, max_evals)
    try:
        minimize(
            counting,
            x0,
            method="COBYLA",
            options={"rhobeg": rho_begin, "tol": rho_end, "maxiter": int(max_evals)},
        )
    except _BudgetExhausted:
        pass
    assert counting.x_best is not None
    status = (
        OptStatus.BUDGET_EXHAUSTED
        if counting.n_evals >= max_evals
        else OptStatus.CONVERGED
    )
    return LocalResult(
        x_best=counting.x_best,
        f_best=counting.f_best,
        n_evals=counting.n_evals,
        status=status,
    )


def basin_hopping(
    f: Objective,
    x0: np.ndarray,
    local: LocalConfig = LocalConfig(),
    hop: HopConfig = HopConfig(),
) -> LocalResult:
    """Global minimization: local COBYLA runs chained by random restarts.

    Each hop displaces all coordinates of the currently accepted point by
    independent uniform draws from [-step_size, +step_size] and minimizes
    locally; the result replaces the accepted point if it is lower, or with
    probability exp(-(f_new - f_acc) / temperature) otherwise (uphill moves
    are always rejected at temperature 0). Reproducible from hop.seed.
    """
    if hop.seed is None:
        raise ValueError("hop.seed must be an integer for a standalone run")
    rng = np.random.default_rng(hop.seed)
    first = cobyla_minimize(f, x0, local.rho_begin, local.rho_end, local.max_evals)
    x_acc, f_acc = first.x_best, first.f_best
    x_best, f_best = first.x_best, first.f_best
    n_evals = first.n_evals
    exhausted = first.status is OptStatus.BUDGET_EXHAUSTED
    for _ in range(hop.n_hops):
        x_try = x_acc + rng.uniform(-hop.step_size, hop.step_size, size=x_acc.size)
        res = cobyla_minimize(
            f, x_try, local.rho_begin, local.rho_end, local.max_evals
        )
        n_evals += res.n_evals
        exhausted = exhausted or res.status is OptStatus.BUDGET_EXHAUSTED
        if res.f_best < f_best:
            x_best, f_best = res.x_best, res.f_best
        accept = res.f_best < f_acc
        if not accept and hop.temperature > 0:
            accept = rng.random() < math.exp(
                -(res.f_best - f_acc) / hop.temperature
            )
        if accept:
            x_acc, f_acc = res.x_best, res.f_best
    return LocalResult(
        x_best=x_best,
        f_best=f_best,
        n_evals=n_evals,
        status=OptStatus.BUDGET_EXHAUSTED if exhausted else OptStatus.CONVERGED,
    )
