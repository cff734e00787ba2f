"""SIR compartment model: right-hand side, fixed-step RK4, reproduction numbers
and the day-to-day difference estimators of the rates."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .epi_data import EpidemicSeries, susceptible_series

DEFAULT_DT = 0.05
NEGATIVE_TOL = 1e-9


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t={t:.6g}")
        self.t = t


@dataclass(frozen=True)
class SirParams:
    lam: float
    gamma: float

    def __post_init__(self):
        if not (self.lam >= 0 and self.gamma >= 0):
            raise ValueError(f"rates must be non-negative, got lambda={self.lam}, gamma={self.gamma}")


@dataclass(frozen=True)
class SirState:
    S: float
    I: float
    R: float

    @property
    def N(self) -> float:
        return self.S + self.I + self.R

    @property
    def T(self) -> float:
        return self.I + self.R

    def as_array(self) -> np.ndarray:
        return np.array([self.S, self.I, self.R], dtype=float)


@dataclass(frozen=True)
class SirTrajectory:
    """States sampled at day boundaries; ``states`` has shape (len(times), 3)."""

    times: np.ndarray
    states: np.ndarray
    params: SirParams

    @property
    def S(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def I(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def R(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def T(self) -> np.ndarray:
        return self.states[:, 1] + self.states[:, 2]

    @property
    def N(self) -> float:
        return float(self.states[0].sum())

    def state(self, i: int) -> SirState:
        return SirState(*map(float, self.states[i]))

    def at(self, t: float) -> SirState:
        idx = np.flatnonzero(np.isclose(self.times, t, rtol=0, atol=1e-9))
        if idx.size == 0:
            raise KeyError(t)
        return self.state(int(idx[0]))

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "S", "I", "R", "T"])
        for t, (S, I, R) in zip(self.times, self.states):
            w.writerow([f"{v:.17g}" for v in (t, S, I, R, I + R)])
        return out.getvalue()


def sir_rhs(state: SirState | np.ndarray, params: SirParams) -> tuple[float, float, float]:
    S, I, R = state.as_array() if isinstance(state, SirState) else state
    infection = params.lam * S * I
    removal = params.gamma * I
    return -infection, infection - removal, removal


def _day_marks(t0: float, t1: float) -> np.ndarray:
    if t1 == t0:
        raise ValueError("t1 must differ from t0")
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    whole = math.floor(span + 1e-12)
    marks = [t0 + direction * d for d in range(whole + 1)]
    if span - whole > 1e-12:
        marks.append(t1)
    return np.array(marks, dtype=float)


def _substeps(seg: float, dt: float) -> tuple[int, float]:
    nsub = max(1, math.ceil(abs(seg) / dt - 1e-9))
    return nsub, float(seg) / nsub


def rk4_path(
    f: Callable[[np.ndarray], np.ndarray],
    y0,
    t0: float,
    t1: float,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Classical RK4 for an autonomous system, sampled at whole days from ``t0``.

    Each day (and a trailing partial day, if any) is split into equal substeps
    no longer than ``dt``; ``t1 < t0`` integrates backward.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    times = _day_marks(t0, t1)
    y = np.array(y0, dtype=float)
    out = np.empty((times.size, y.size))
    out[0] = y
    for i in range(1, times.size):
        nsub, h = _substeps(times[i] - times[i - 1], dt)
        for _ in range(nsub):
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = y
    return times, out


def integrate(
    initial: SirState,
    params: SirParams,
    t0: float,
    t1: float,
    dt: float = DEFAULT_DT,
) -> SirTrajectory:
    """Integrate the SIR system from ``t0`` to ``t1`` (backward if ``t1 < t0``).

    Raises IntegrationError if any compartment falls below ``-1e-9 * N`` or a
    value stops being finite; tiny negative excursions are clamped to zero in
    the returned trajectory.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    S, I, R = (float(v) for v in initial.as_array())
    if S < 0 or I < 0 or R < 0:
        raise ValueError(f"initial state must be non-negative, got {initial}")
    floor = -NEGATIVE_TOL * max(S + I + R, 1.0)
    lam, gamma = params.lam, params.gamma
    times = _day_marks(t0, t1)
    out = np.empty((times.size, 3))
    out[0] = S, I, R
    t = t0
    # scalar arithmetic: several times faster than 3-element numpy arrays
    for i in range(1, times.size):
        nsub, h = _substeps(times[i] - times[i - 1], dt)
        hh = 0.5 * h
        for _ in range(nsub):
            a1 = lam * S * I
            b1 = gamma * I
            S2, I2 = S - hh * a1, I + hh * (a1 - b1)
            a2 = lam * S2 * I2
            b2 = gamma * I2
            S3, I3 = S - hh * a2, I + hh * (a2 - b2)
            a3 = lam * S3 * I3
            b3 = gamma * I3
            S4, I4 = S - h * a3, I + h * (a3 - b3)
            a4 = lam * S4 * I4
            b4 = gamma * I4
            inf = (a1 + 2.0 * a2 + 2.0 * a3 + a4) * (h / 6.0)
            rem = (b1 + 2.0 * b2 + 2.0 * b3 + b4) * (h / 6.0)
            S, I, R = S - inf, I + inf - rem, R + rem
            t += h
            if not (S >= floor and I >= floor and R >= floor):
                if math.isfinite(S) and math.isfinite(I) and math.isfinite(R):
                    raise IntegrationError(f"negative compartment (S={S:.6g}, I={I:.6g}, R={R:.6g})", t)
                raise IntegrationError("non-finite state", t)
        out[i] = S, I, R
    return SirTrajectory(times, np.maximum(out, 0.0), params)


def basic_reproduction_number(params: SirParams, S0: float) -> float:
    if params.gamma == 0:
        raise ZeroDivisionError("R0 is undefined for a zero removal rate")
    return params.lam * S0 / params.gamma


def current_reproduction_number(lam_t: float, gamma_t: float, S_t: float) -> float:
    if gamma_t == 0:
        raise ZeroDivisionError("R_c is undefined for a zero removal rate")
    return lam_t * S_t / gamma_t


def difference_estimates(series: EpidemicSeries, N: float) -> tuple[np.ndarray, np.ndarray]:
    """Daily rate estimates from one-day differences.

    Returns ``(lam, gamma)``, each of length ``len(series) - 1``; entry ``j``
    uses days ``j`` and ``j + 1``. Entries with zero active cases (or zero
    susceptibles for ``lam``) are NaN.
    """
    if len(series) < 2:
        raise ValueError("need at least two days of data")
    S = susceptible_series(series, N)
    I = series.active[:-1]
    R = series.cum_removed
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where((I > 0) & (S[:-1] > 0), (S[:-1] - S[1:]) / (S[:-1] * I), np.nan)
        gamma = np.where(I > 0, (R[1:] - R[:-1]) / I, np.nan)
    return lam, gamma


def rolling_mean(values, window: int = 7) -> np.ndarray:
    """Trailing mean over the last ``window`` positions, ignoring NaN gaps."""
    if window < 1:
        raise ValueError("window must be >= 1")
    v = np.asarray(values, dtype=float)
    out = np.full(v.shape, np.nan)
    for i in range(v.size):
        chunk = v[max(0, i - window + 1) : i + 1]
        chunk = chunk[~np.isnan(chunk)]
        if chunk.size:
            out[i] = chunk.mean()
    return out
