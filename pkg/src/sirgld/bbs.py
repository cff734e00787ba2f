"""Best-backward solution: estimate SIR rates by integrating backward from the
last observation and matching the trailing ``s`` days of T and R."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .epi_data import EpidemicSeries, susceptible_series
from .optimizer import OptResult, SimplexConfig, minimize
from .sir import DEFAULT_DT, IntegrationError, SirParams, SirState, difference_estimates, integrate, rolling_mean


@dataclass(frozen=True)
class BbsConfig:
    N: float
    s: int = 7
    epsilon: float = 1e-10
    max_iterations: int = 5000
    dt: float = DEFAULT_DT
    guess_window: int = 7

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("window s must be >= 1")
        if not self.N > 0:
            raise ValueError("N must be positive")

    def simplex(self) -> SimplexConfig:
        return SimplexConfig(epsilon=self.epsilon, max_iterations=self.max_iterations)


def terminal_state(series: EpidemicSeries, N: float) -> SirState:
    S = susceptible_series(series, N)
    return SirState(float(S[-1]), float(series.active[-1]), float(series.cum_removed[-1]))


def _check_window(series: EpidemicSeries, config: BbsConfig) -> None:
    if config.s > len(series) - 1:
        raise ValueError(f"window s={config.s} needs at least {config.s + 1} days, have {len(series)}")
    susceptible_series(series, config.N)
    if series.active[-1] <= 0:
        raise ValueError("no active cases on the last day; backward fit is degenerate")


def bbs_objective(params: SirParams, series: EpidemicSeries, config: BbsConfig, form: str = "T") -> float:
    """Squared deviation over days ``n - s .. n`` of the backward trajectory.

    ``form="T"`` compares cumulative infected, ``form="S"`` compares
    susceptibles; with ``S = N - T`` the two are the same number. Returns
    ``inf`` when the backward integration breaks down.
    """
    _check_window(series, config)
    N = config.N
    n_day = series.last_day
    try:
        traj = integrate(terminal_state(series, N), params, n_day, n_day - config.s, config.dt)
    except IntegrationError:
        return math.inf
    # trajectory runs backward: reverse to align with the observation window
    S = traj.S[::-1]
    R = traj.R[::-1]
    R_obs = series.cum_removed[-config.s - 1 :]
    T_obs = series.cum_infected[-config.s - 1 :]
    if form == "T":
        dev = (N - S) - T_obs
    elif form == "S":
        dev = S - (N - T_obs)
    else:
        raise ValueError(f"unknown form {form!r}")
    return float(np.sum(dev**2) + np.sum((R - R_obs) ** 2))


def initial_rates(series: EpidemicSeries, N: float, window: int = 7) -> SirParams:
    """Trailing mean of the difference estimates ending at day n-1."""
    lam, gamma = difference_estimates(series, N)
    lam0 = rolling_mean(lam, window)[-1]
    gamma0 = rolling_mean(gamma, window)[-1]
    if math.isnan(lam0) or math.isnan(gamma0):
        raise ValueError("no defined difference estimates near the end of the series (no active cases)")
    return SirParams(float(lam0), float(gamma0))


@dataclass(frozen=True)
class BbsFit:
    params: SirParams
    result: OptResult
    initial: SirParams
    config: BbsConfig

    @property
    def converged(self) -> bool:
        return self.result.converged

    def to_dict(self) -> dict:
        return {
            "lambda": self.params.lam,
            "gamma": self.params.gamma,
            "objective": self.result.fun,
            "iterations": self.result.iterations,
            "converged": self.result.converged,
            "window_s": self.config.s,
            "N": self.config.N,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def fit_bbs(series: EpidemicSeries, config: BbsConfig) -> BbsFit:
    """Fit (lambda, gamma) by Nelder-Mead over (log lambda, log gamma)."""
    _check_window(series, config)
    guess = initial_rates(series, config.N, config.guess_window)
    # log space cannot start at an exact zero rate
    lam0 = max(guess.lam, 1e-12 / config.N)
    gamma0 = max(guess.gamma, 1e-12)

    def objective(x):
        lam, gamma = math.exp(x[0]), math.exp(x[1])
        return bbs_objective(SirParams(lam, gamma), series, config)

    x0 = [math.log(lam0), math.log(gamma0)]
    if not math.isfinite(objective(x0)):
        # crude difference estimates can make the backward run infeasible
        x0 = [math.log(lam0), math.log(gamma0) - math.log(2.0)]
    res = minimize(objective, x0, config.simplex())
    params = SirParams(math.exp(res.x[0]), math.exp(res.x[1]))
    return BbsFit(params, res, guess, config)
