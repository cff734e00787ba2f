"""Generalized logistic distribution (Richards curve).

Two parameterizations of the same S-shaped curve live here:

* distribution form ``F(t) = (1 + exp(-(t - mu) / sigma)) ** -beta``
  (:class:`GldParams`), fitted by grouped, truncated maximum likelihood;
* growth form ``T(t) = N / (1 + (k**-m - 1) exp(-b m t)) ** (1/m)``
  (:class:`GrowthParams`), the solution of ``dT/dt = b T (1 - (T/N)**m)``.

They are related by ``b = beta/sigma``, ``m = 1/beta``,
``k = (1 + exp(mu/sigma)) ** -beta`` (so ``k = F(0) = T(0)/N``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .epi_data import GroupedCounts
from .optimizer import OptResult, SimplexConfig, minimize


@dataclass(frozen=True)
class GldParams:
    sigma: float
    mu: float
    beta: float

    def __post_init__(self):
        if not (self.sigma > 0 and self.beta > 0 and math.isfinite(self.mu)):
            raise ValueError(f"invalid GLD parameters {self}")


@dataclass(frozen=True)
class GrowthParams:
    b: float
    k: float
    m: float
    N: float

    def __post_init__(self):
        if not (self.b > 0 and self.m > 0 and self.N > 0):
            raise ValueError(f"b, m and N must be positive, got {self}")
        if not 0 < self.k < 1:
            raise ValueError(f"k = T(0)/N must lie in (0, 1), got {self.k}")

    @property
    def T0(self) -> float:
        return self.k * self.N


def log_cdf(t, params: GldParams):
    z = (np.asarray(t, dtype=float) - params.mu) / params.sigma
    # log(1 + exp(-z)) without overflow in either tail
    return -params.beta * np.logaddexp(0.0, -z)


def cdf(t, params: GldParams):
    return np.exp(log_cdf(t, params))


def pdf(t, params: GldParams):
    z = (np.asarray(t, dtype=float) - params.mu) / params.sigma
    # dF/dt = (beta/sigma) F(t) / (1 + exp(z))
    return params.beta / params.sigma * np.exp(log_cdf(t, params) - np.logaddexp(0.0, z))


def quantile(u, params: GldParams):
    u = np.asarray(u, dtype=float)
    return params.mu - params.sigma * np.log(np.expm1(-np.log(u) / params.beta))


def sample(n: int, params: GldParams, rng: np.random.Generator) -> np.ndarray:
    """Inverse-transform draws."""
    return quantile(rng.uniform(size=n), params)


def bin_counts(samples, boundaries) -> GroupedCounts:
    """Group raw event times into ``(-inf, t_0], (t_0, t_1], ...``; later events are dropped."""
    b = np.asarray(boundaries, dtype=float)
    x = np.asarray(samples, dtype=float)
    x = x[x <= b[-1]]
    idx = np.searchsorted(b, x, side="left")
    return GroupedCounts(b, np.bincount(idx, minlength=b.size).astype(float))


def bin_log_probs(params: GldParams, boundaries) -> np.ndarray:
    """Log of the n + 1 bin probabilities, each divided by F(t_n)."""
    lf = log_cdf(boundaries, params)
    out = np.empty_like(lf)
    out[0] = lf[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        # log(F_i - F_{i-1}) = log F_i + log(1 - F_{i-1}/F_i)
        out[1:] = lf[1:] + np.log(-np.expm1(lf[:-1] - lf[1:]))
    return out - lf[-1]


def log_likelihood(params: GldParams, data: GroupedCounts) -> float:
    """Grouped, truncated log-likelihood. Returns -inf if an occupied bin has zero probability."""
    lp = bin_log_probs(params, data.boundaries)
    occupied = data.counts > 0
    if not np.all(np.isfinite(lp[occupied])):
        return -math.inf
    return float(np.sum(data.counts[occupied] * lp[occupied]))


def grouped_quantile(data: GroupedCounts, q: float) -> float:
    """Quantile of grouped data, interpolating linearly inside the bin.

    The open first bin is treated as one day wide.
    """
    cum = np.cumsum(data.counts)
    target = q * cum[-1]
    i = int(np.searchsorted(cum, target, side="left"))
    hi = data.boundaries[i]
    lo = data.boundaries[i - 1] if i > 0 else hi - 1.0
    below = cum[i - 1] if i > 0 else 0.0
    frac = (target - below) / data.counts[i] if data.counts[i] > 0 else 1.0
    return float(lo + frac * (hi - lo))


def initial_guess(data: GroupedCounts) -> GldParams:
    iqr = grouped_quantile(data, 0.75) - grouped_quantile(data, 0.25)
    return GldParams(sigma=max(iqr / 2.0, 0.5), mu=grouped_quantile(data, 0.5), beta=1.0)


@dataclass(frozen=True)
class GldFit:
    params: GldParams
    log_likelihood: float
    result: OptResult
    N_hat: float | None = None

    @property
    def converged(self) -> bool:
        return self.result.converged

    def to_dict(self) -> dict:
        return {
            "sigma": self.params.sigma,
            "mu": self.params.mu,
            "beta": self.params.beta,
            "log_likelihood": self.log_likelihood,
            "N_hat": self.N_hat,
            "converged": self.converged,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def fit_mle(data: GroupedCounts, config: SimplexConfig | None = None) -> GldFit:
    """Maximum likelihood fit over ``(log sigma, mu, log beta)``.

    The simplex minimizes the negative log-likelihood per observed case so
    the tolerance does not depend on the epidemic's size.
    """
    if np.count_nonzero(data.counts) < 3:
        raise ValueError("need at least 3 bins with positive counts to fit 3 parameters")
    total = data.total
    start = initial_guess(data)

    def objective(x):
        sigma, beta = math.exp(x[0]), math.exp(x[2])
        if not (sigma > 0 and beta > 0 and math.isfinite(sigma) and math.isfinite(beta)):
            return math.inf
        return -log_likelihood(GldParams(sigma, float(x[1]), beta), data) / total

    res = minimize(objective, [math.log(start.sigma), start.mu, math.log(start.beta)], config)
    params = GldParams(math.exp(res.x[0]), float(res.x[1]), math.exp(res.x[2]))
    return GldFit(params, -res.fun * total, res)


def logistic_growth(t, N: float, T0: float, lam: float):
    if not 0 < T0 < N:
        raise ValueError("need 0 < T0 < N")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    t = np.asarray(t, dtype=float)
    return N / (1.0 + (N / T0 - 1.0) * np.exp(-lam * N * t))


def logistic_inflection(N: float, T0: float, lam: float) -> tuple[float, float]:
    return math.log(N / T0 - 1.0) / (lam * N), N / 2.0


def gld_growth(t, params: GrowthParams):
    b, k, m, N = params.b, params.k, params.m, params.N
    t = np.asarray(t, dtype=float)
    log_c = math.log(math.expm1(-m * math.log(k)))  # log(k**-m - 1)
    return N * np.exp(-np.logaddexp(0.0, log_c - b * m * t) / m)


def gld_growth_rhs(T, params: GrowthParams):
    return params.b * T * (1.0 - (T / params.N) ** params.m)


def gld_inflection(params: GrowthParams) -> tuple[float, float] | None:
    """Time and height of the inflection point, or None if it is not at t > 0."""
    b, m, N = params.b, params.m, params.N
    arg = math.expm1(-m * math.log(params.k)) / m  # ((N/T0)**m - 1) / m
    if arg <= 1.0:
        return None
    t_star = math.log(arg) / (b * m)
    return t_star, float(gld_growth(t_star, params))


def params_to_growth(gld: GldParams, N: float) -> GrowthParams:
    k = math.exp(-gld.beta * np.logaddexp(0.0, gld.mu / gld.sigma))
    return GrowthParams(b=gld.beta / gld.sigma, k=k, m=1.0 / gld.beta, N=N)


def growth_to_params(growth: GrowthParams) -> tuple[GldParams, float]:
    b, k, m = growth.b, growth.k, growth.m
    if not 0 < k < 1:
        raise ValueError(f"k must lie in (0, 1), got {k}")
    mu = math.log(math.expm1(-m * math.log(k))) / (b * m)
    return GldParams(sigma=1.0 / (b * m), mu=mu, beta=1.0 / m), growth.N


def final_size_estimate(T_t: float, t: float, params: GldParams) -> float:
    """Final epidemic size implied by the count ``T_t`` observed at ``t``."""
    F = float(cdf(t, params))
    if F <= 0.0:
        raise ValueError(f"F({t}) underflows to 0; final size is undefined this early")
    return T_t / F
