"""Nelder-Mead simplex minimization.

Used for both the backward SIR fit and the GLD likelihood fit. Objectives may
return ``+inf`` to mark infeasible points; such vertices simply rank worst.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SimplexConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    epsilon: float = 1e-10
    max_iterations: int = 5000
    xtol: float = 1e-8

    def __post_init__(self):
        if not self.reflection > 0:
            raise ValueError("reflection coefficient must be > 0")
        if not self.expansion > 1:
            raise ValueError("expansion coefficient must be > 1")
        if not 0 < self.contraction < 1:
            raise ValueError("contraction coefficient must lie in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink coefficient must lie in (0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not self.xtol > 0:
            raise ValueError("xtol must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class OptResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool
    last_improvement: float = math.nan


def initial_simplex(x0: np.ndarray) -> np.ndarray:
    n = x0.size
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += max(0.05 * abs(x0[i]), 1e-4)
    return simplex


def minimize(
    objective: Callable[[np.ndarray], float],
    x0,
    config: SimplexConfig | None = None,
) -> OptResult:
    """Minimize ``objective`` starting from ``x0``.

    Stops once the best value moved by less than ``epsilon`` in the last
    iteration, all vertex values agree within ``epsilon`` (both scaled by
    ``max(1, |f_best|)`` so large objectives are not held to tolerances below
    their rounding noise) and the simplex has
    collapsed to within ``xtol`` (relative, floor 1) of the best vertex. The
    value checks alone are fooled by vertices placed symmetrically about the
    minimum. Returns with ``converged=False`` when ``max_iterations`` runs out.
    """
    cfg = config or SimplexConfig()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.ndim != 1 or x0.size < 1:
        raise ValueError("x0 must be a non-empty vector")

    def f(x):
        v = float(objective(x))
        return math.inf if math.isnan(v) else v

    f0 = f(x0)
    if not math.isfinite(f0):
        raise ValueError(f"objective is not finite at x0={x0.tolist()}")

    simplex = initial_simplex(x0)
    fvals = np.array([f0] + [f(v) for v in simplex[1:]])
    order = np.argsort(fvals, kind="stable")
    simplex, fvals = simplex[order], fvals[order]
    prev_best = fvals[0]
    improvement = math.inf

    for it in range(1, cfg.max_iterations + 1):
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + cfg.reflection * (centroid - worst)
        fr = f(xr)
        if fr < fvals[0]:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + cfg.contraction * (xr - centroid)
                fc = f(xc)
                accept = fc <= fr
            else:
                xc = centroid + cfg.contraction * (worst - centroid)
                fc = f(xc)
                accept = fc < fvals[-1]
            if accept:
                simplex[-1], fvals[-1] = xc, fc
            else:
                best = simplex[0]
                simplex[1:] = best + cfg.shrink * (simplex[1:] - best)
                fvals[1:] = [f(v) for v in simplex[1:]]

        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        improvement = prev_best - fvals[0]
        prev_best = fvals[0]
        spread = fvals[-1] - fvals[0]
        tol = cfg.epsilon * max(1.0, abs(fvals[0]))
        size = np.max(np.abs(simplex[1:] - simplex[0]) / np.maximum(1.0, np.abs(simplex[0])))
        if improvement < tol and spread < tol and size <= cfg.xtol:
            return OptResult(simplex[0].copy(), float(fvals[0]), it, True, float(improvement))

    return OptResult(simplex[0].copy(), float(fvals[0]), cfg.max_iterations, False, float(improvement))
