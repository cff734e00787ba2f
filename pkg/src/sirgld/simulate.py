"""Synthetic daily case counts in the ingestion format.

Model curves are turned into integer daily counts either deterministically
(rounding the cumulative curve, so counts add up exactly to it) or by Poisson
draws around the expected daily increments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .epi_data import DailyRecord, EpidemicSeries
from .gld import GldParams, cdf
from .sir import DEFAULT_DT, SirParams, SirState, integrate, rk4_path


@dataclass(frozen=True)
class SirScenario:
    N: float = 10_000
    lam: float = 2e-5
    gamma: float = 0.1
    I0: float = 10
    days: int = 120
    fatality: float = 0.0
    dt: float = DEFAULT_DT

    def curves(self) -> tuple[np.ndarray, np.ndarray]:
        """Cumulative infected and removed at the end of days 1..days."""
        tr = integrate(SirState(self.N - self.I0, self.I0, 0.0), SirParams(self.lam, self.gamma), 0, self.days, self.dt)
        return tr.T[1:], tr.R[1:]


@dataclass(frozen=True)
class GldScenario:
    """Infections follow ``N * F(t)``; infected people are removed at rate ``gamma``."""

    N: float = 70_000
    sigma: float = 5.0
    mu: float = 30.0
    beta: float = 0.8
    gamma: float = 0.05
    days: int = 120
    fatality: float = 0.0
    dt: float = DEFAULT_DT

    @property
    def params(self) -> GldParams:
        return GldParams(self.sigma, self.mu, self.beta)

    def curves(self) -> tuple[np.ndarray, np.ndarray]:
        p, N, gamma = self.params, self.N, self.gamma

        def f(y):
            # y = (t, R); time is carried as a state to keep the system autonomous
            return np.array([1.0, gamma * (N * float(cdf(y[0], p)) - y[1])])

        _, ys = rk4_path(f, [0.0, 0.0], 0.0, float(self.days), self.dt)
        days = np.arange(1, self.days + 1, dtype=float)
        T = N * cdf(days, p)
        R = np.minimum(ys[1:, 1], T)
        return T, R


def round_cumulative(curve) -> np.ndarray:
    """Integer cumulative counts whose daily differences are non-negative."""
    c = np.floor(np.asarray(curve, dtype=float) + 0.5)
    return np.maximum.accumulate(c)


def counts_from_curves(
    T,
    R,
    fatality: float = 0.0,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list[DailyRecord]:
    """Daily records from cumulative infected/removed curves.

    ``noise == 0`` rounds the cumulative curves; ``noise > 0`` draws Poisson
    counts whose means are the expected increments (``noise`` scales the
    deviation from the mean, 1 being plain Poisson).
    """
    T = np.asarray(T, dtype=float)
    R = np.asarray(R, dtype=float)
    if noise == 0:
        Tc = round_cumulative(T)
        Rc = np.minimum(round_cumulative(R), Tc)
    else:
        if rng is None:
            raise ValueError("noisy simulation needs a random generator")
        Tc = np.cumsum(_noisy(np.diff(T, prepend=0.0), noise, rng))
        Rc = np.empty_like(Tc)
        acc = 0.0
        for i, dR in enumerate(_noisy(np.diff(R, prepend=0.0), noise, rng)):
            acc = min(acc + dR, Tc[i])
            Rc[i] = acc
    died = np.floor(fatality * Rc + 0.5)
    recovered = Rc - died
    new_inf = np.diff(Tc, prepend=0.0).astype(int)
    new_died = np.diff(died, prepend=0.0).astype(int)
    new_rec = np.diff(recovered, prepend=0.0).astype(int)
    return [DailyRecord(d + 1, int(a), int(b), int(c)) for d, (a, b, c) in enumerate(zip(new_inf, new_died, new_rec))]


def _noisy(mean: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    mean = np.maximum(mean, 0.0)
    draws = rng.poisson(mean).astype(float)
    return np.maximum(np.floor(mean + noise * (draws - mean) + 0.5), 0.0)


def simulate(scenario: SirScenario | GldScenario, noise: float = 0.0, seed: int = 0) -> EpidemicSeries:
    T, R = scenario.curves()
    rng = np.random.default_rng(seed)
    return EpidemicSeries.from_records(counts_from_curves(T, R, scenario.fatality, noise, rng))
