"""Combining the GLD and SIR fits.

The GLD fit needs no population size and gives an early estimate of the final
outbreak size; that estimate is then used as N for the backward SIR fit and
the forward forecast. L-plots track either model's estimate of the cumulative
count at a fixed day (or at infinity) as the data are truncated later and later.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .bbs import BbsConfig, BbsFit, fit_bbs, terminal_state
from .epi_data import EpidemicSeries, grouped_counts
from .gld import cdf, final_size_estimate, fit_mle
from .sir import DEFAULT_DT, SirTrajectory, integrate

GLD = "GLD"
SIR = "SIR"


@dataclass(frozen=True)
class LPlotSeries:
    truncation_days: np.ndarray
    estimates: np.ndarray  # NaN where the fit failed
    model: str
    t_conv: float
    status: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> np.ndarray:
        return np.isfinite(self.estimates)

    def estimate_at(self, day: float) -> float:
        idx = np.flatnonzero(self.truncation_days == day)
        if idx.size == 0:
            raise KeyError(day)
        return float(self.estimates[idx[0]])

    def to_rows(self) -> list[list[str]]:
        status = self.status or tuple("ok" if ok else "failed" for ok in self.ok)
        return [
            [str(int(d)), "" if not math.isfinite(e) else f"{e:.17g}", self.model, st]
            for d, e, st in zip(self.truncation_days, self.estimates, status)
        ]

    def to_csv(self) -> str:
        return lplots_to_csv([self])


def lplots_to_csv(lplots) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["truncation_day", "estimate", "model", "status"])
    for lp in lplots:
        w.writerows(lp.to_rows())
    return out.getvalue()


def first_truncation_day(series: EpidemicSeries, min_days: int = 10, min_cases: float = 20) -> float:
    """Later of day ``min_days`` and the first day with ``min_cases`` cumulative cases."""
    reached = np.flatnonzero(series.cum_infected >= min_cases)
    if reached.size == 0:
        raise ValueError(f"series never reaches {min_cases} cumulative cases")
    return max(float(series.days[0]) + min_days - 1, float(series.days[reached[0]]))


def _truncation_days(series: EpidemicSeries, start, stop, step) -> np.ndarray:
    start = first_truncation_day(series) if start is None else float(start)
    stop = series.last_day if stop is None else min(float(stop), series.last_day)
    days = np.arange(start, stop + 0.5, step, dtype=float)
    if days.size == 0:
        raise ValueError(f"no truncation days between {start} and {stop}")
    return days


def _gld_estimate(day: float, series: EpidemicSeries, t_conv: float) -> tuple[float, str]:
    part = series.truncate(day)
    try:
        fit = fit_mle(grouped_counts(part))
        N_hat = final_size_estimate(part.cum_infected[-1], day, fit.params)
    except (ValueError, ArithmeticError) as exc:
        return math.nan, f"failed: {exc}"
    est = N_hat if math.isinf(t_conv) else N_hat * float(cdf(t_conv, fit.params))
    if not (math.isfinite(est) and est > 0):
        return math.nan, "failed: non-finite estimate"
    return est, "ok" if fit.converged else "ok (not converged)"


def _sir_estimate(day: float, series: EpidemicSeries, t_conv: float, N: float, s: int, dt: float) -> tuple[float, str]:
    part = series.truncate(day)
    try:
        fit = fit_bbs(part, BbsConfig(N=N, s=s, dt=dt))
        if t_conv == day:
            est = float(part.cum_infected[-1])
        else:
            traj = integrate(terminal_state(part, N), fit.params, day, t_conv, dt)
            est = float(traj.T[-1])
    except (ValueError, ArithmeticError) as exc:
        return math.nan, f"failed: {exc}"
    if not (math.isfinite(est) and est > 0):
        return math.nan, "failed: non-finite estimate"
    return est, "ok" if fit.converged else "ok (not converged)"


def _run(fn, days, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, days))
    return [fn(d) for d in days]


def _assemble(days, results, model, t_conv) -> LPlotSeries:
    est = np.array([r[0] for r in results], dtype=float)
    if not np.any(np.isfinite(est)):
        raise RuntimeError(f"every {model} fit failed: {results[-1][1]}")
    return LPlotSeries(days, est, model, t_conv, tuple(r[1] for r in results))


def lplot_gld(
    series: EpidemicSeries,
    t_conv: float = math.inf,
    start: float | None = None,
    stop: float | None = None,
    step: int = 1,
    workers: int | None = None,
) -> LPlotSeries:
    """GLD estimate of T(t_conv) (final size if ``t_conv`` is inf) per truncation day."""
    days = _truncation_days(series, start, stop, step)
    results = _run(partial(_gld_estimate, series=series, t_conv=float(t_conv)), days, workers)
    return _assemble(days, results, GLD, float(t_conv))


def lplot_sir(
    series: EpidemicSeries,
    t_conv: float,
    N: float,
    start: float | None = None,
    stop: float | None = None,
    step: int = 1,
    s: int = 7,
    dt: float = DEFAULT_DT,
    workers: int | None = None,
) -> LPlotSeries:
    """SIR (backward fit, then forward run) estimate of T(t_conv) per truncation day."""
    if not math.isfinite(t_conv):
        raise ValueError("the SIR L-plot needs a finite t_conv")
    if start is None:
        start = max(first_truncation_day(series), series.days[0] + s)
    days = _truncation_days(series, start, stop, step)
    results = _run(partial(_sir_estimate, series=series, t_conv=float(t_conv), N=N, s=s, dt=dt), days, workers)
    return _assemble(days, results, SIR, float(t_conv))


def estimate_N(lplot: LPlotSeries, window: int = 5, band: float = 0.02) -> tuple[float | None, float | None]:
    """First point where the last ``window`` successful estimates sit within
    ``band`` (relative) of their median.

    Returns ``(median, truncation_day)`` or ``(None, None)``.
    """
    ok = lplot.ok
    days = lplot.truncation_days[ok]
    est = lplot.estimates[ok]
    for i in range(window - 1, est.size):
        chunk = est[i - window + 1 : i + 1]
        med = float(np.median(chunk))
        if np.all(np.abs(chunk - med) <= band * med):
            return med, float(days[i])
    return None, None


@dataclass(frozen=True)
class CombinedForecast:
    N_hat: float
    fit: BbsFit
    trajectory: SirTrajectory
    horizon: int
    stabilization_day: float | None = None
    lplot: LPlotSeries | None = None

    @property
    def sir_params(self):
        return self.fit.params

    def header(self) -> dict:
        return {
            "N_hat": self.N_hat,
            "lambda": self.fit.params.lam,
            "gamma": self.fit.params.gamma,
            "stabilization_day": self.stabilization_day,
        }

    def header_json(self) -> str:
        return json.dumps(self.header(), indent=2)

    def to_csv(self) -> str:
        return self.trajectory.to_csv()


def combined_forecast(
    series: EpidemicSeries,
    horizon: int,
    N: float | None = None,
    s: int = 7,
    dt: float = DEFAULT_DT,
    window: int = 5,
    band: float = 0.02,
    workers: int | None = None,
) -> CombinedForecast:
    """Forecast ``horizon`` days past the last observation.

    N comes from the stabilized GLD L-plot unless given explicitly.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    lp = None
    stab_day = None
    if N is None:
        lp = lplot_gld(series, math.inf, workers=workers)
        N, stab_day = estimate_N(lp, window, band)
        if N is None:
            raise RuntimeError("GLD final-size estimates never stabilized; pass N explicitly")
    fit = fit_bbs(series, BbsConfig(N=N, s=s, dt=dt))
    start = terminal_state(series, N)
    t_n = series.last_day
    if horizon == 0:
        traj = SirTrajectory(np.array([t_n]), start.as_array()[None, :], fit.params)
    else:
        traj = integrate(start, fit.params, t_n, t_n + horizon, dt)
    return CombinedForecast(N, fit, traj, horizon, stab_day, lp)
