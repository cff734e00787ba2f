"""Command-line interface.

Exit codes: 0 success, 1 invalid input or failed precondition, 2 an optimizer
did not converge (outputs are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import combo
from .bbs import BbsConfig, fit_bbs
from .epi_data import ValidationError, grouped_counts, load_series, serialize_series
from .gld import cdf, final_size_estimate, fit_mle
from .optimizer import SimplexConfig
from .simulate import GldScenario, SirScenario, counts_from_curves

log = logging.getLogger("sirgld")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2


@dataclass
class RunConfig:
    subcommand: str
    input: Path | None = None
    out: Path | None = None
    options: dict = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        opts = {k: v for k, v in vars(args).items() if k not in ("command", "input", "out", "seed", "func", "verbose")}
        return cls(args.command, getattr(args, "input", None), getattr(args, "out", None), opts, getattr(args, "seed", 0))


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_json(path: Path, obj: dict) -> None:
    _write(path, json.dumps(obj, indent=2) + "\n")


def _t_conv(value: str) -> float:
    if value.lower() in ("inf", "infinity"):
        return math.inf
    return float(value)


def cmd_validate(cfg: RunConfig) -> int:
    series = load_series(cfg.input)
    print(
        f"{cfg.input}: valid, {len(series)} days, "
        f"cumulative infected {series.cum_infected[-1]:.0f}, removed {series.cum_removed[-1]:.0f}"
    )
    if cfg.out is not None:
        _write(cfg.out, serialize_series(series))
    return EXIT_OK


def cmd_fit_gld(cfg: RunConfig) -> int:
    series = load_series(cfg.input)
    if cfg.options.get("truncate") is not None:
        series = series.truncate(cfg.options["truncate"])
    fit = fit_mle(grouped_counts(series), SimplexConfig(max_iterations=cfg.options["max_iterations"]))
    t_n = series.last_day
    N_hat = final_size_estimate(series.cum_infected[-1], t_n, fit.params)
    report = {**fit.to_dict(), "N_hat": N_hat}
    out = cfg.out or Path(".")
    _write_json(out / "gld_fit.json", report)
    stop = cfg.options.get("curve_days") or int(t_n)
    days = np.arange(1, stop + 1, dtype=float)
    F = cdf(days, fit.params)
    lines = ["t,F,T_hat"] + [f"{int(d)},{_fmt(f)},{_fmt(N_hat * f)}" for d, f in zip(days, F)]
    _write(out / "gld_curve.csv", "\n".join(lines) + "\n")
    print(json.dumps(report, indent=2))
    return EXIT_OK if fit.converged else EXIT_NOT_CONVERGED


def cmd_fit_sir(cfg: RunConfig) -> int:
    series = load_series(cfg.input)
    if cfg.options.get("truncate") is not None:
        series = series.truncate(cfg.options["truncate"])
    o = cfg.options
    fit = fit_bbs(
        series, BbsConfig(N=o["N"], s=o["s"], dt=o["dt"], epsilon=o["epsilon"], max_iterations=o["max_iterations"])
    )
    report = fit.to_dict()
    _write_json((cfg.out or Path(".")) / "bbs_fit.json", report)
    print(json.dumps(report, indent=2))
    return EXIT_OK if fit.converged else EXIT_NOT_CONVERGED


def cmd_lplot(cfg: RunConfig) -> int:
    series = load_series(cfg.input)
    o = cfg.options
    t_conv = o["t_conv"]
    gld_lp = combo.lplot_gld(series, t_conv, start=o["start"], stop=o["stop"], workers=o["workers"])
    lplots = [gld_lp]
    N = o["N"]
    if N is None:
        final = gld_lp if math.isinf(t_conv) else combo.lplot_gld(series, math.inf, start=o["start"], stop=o["stop"], workers=o["workers"])
        N, day = combo.estimate_N(final)
        if N is not None:
            log.info("using stabilized GLD final size N=%.1f (stable from day %g)", N, day)
    if N is None:
        log.warning("no N given and GLD estimates never stabilized; SIR L-plot skipped")
    elif math.isinf(t_conv):
        log.warning("SIR L-plot needs a finite --t-conv; skipped")
    else:
        lplots.append(combo.lplot_sir(series, t_conv, N, start=o["start"], stop=o["stop"], s=o["s"], workers=o["workers"]))
    _write((cfg.out or Path(".")) / "lplot.csv", combo.lplots_to_csv(lplots))
    return EXIT_OK


def cmd_forecast(cfg: RunConfig) -> int:
    series = load_series(cfg.input)
    o = cfg.options
    if o.get("truncate") is not None:
        series = series.truncate(o["truncate"])
    fc = combo.combined_forecast(series, o["horizon"], N=o["N"], s=o["s"], workers=o["workers"])
    out = cfg.out or Path(".")
    _write_json(out / "forecast.json", fc.header())
    _write(out / "forecast.csv", fc.to_csv())
    print(json.dumps(fc.header(), indent=2))
    return EXIT_OK if fc.fit.converged else EXIT_NOT_CONVERGED


def cmd_simulate(cfg: RunConfig) -> int:
    o = cfg.options
    if o["model"] == "sir":
        sc = SirScenario(N=o["N"], lam=o["lam"], gamma=o["gamma"], I0=o["I0"], days=o["days"], fatality=o["fatality"])
    else:
        sc = GldScenario(
            N=o["N"], sigma=o["sigma"], mu=o["mu"], beta=o["beta"], gamma=o["gamma"], days=o["days"], fatality=o["fatality"]
        )
    T, R = sc.curves()
    records = counts_from_curves(T, R, sc.fatality, o["noise"], np.random.default_rng(cfg.seed))
    lines = ["day,new_infected,new_died,new_recovered"]
    lines += [f"{r.day_index},{r.new_infected},{r.new_died},{r.new_recovered}" for r in records]
    text = "\n".join(lines) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        _write(cfg.out, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sirgld", description="SIR / generalized-logistic epidemic fitting")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check an input CSV")
    v.add_argument("input", type=Path)
    v.add_argument("--out", type=Path, help="write the series with derived cumulative columns here")
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("fit-gld", help="maximum-likelihood GLD fit")
    g.add_argument("input", type=Path)
    g.add_argument("--out", type=Path, help="output directory")
    g.add_argument("--truncate", type=float, help="use data up to this day only")
    g.add_argument("--curve-days", type=int, help="extend the fitted curve to this day")
    g.add_argument("--max-iterations", type=int, default=5000)
    g.set_defaults(func=cmd_fit_gld)

    s = sub.add_parser("fit-sir", help="best-backward SIR fit")
    s.add_argument("input", type=Path)
    s.add_argument("--N", type=float, required=True, help="total population")
    s.add_argument("--s", type=int, default=7, help="trailing window in days")
    s.add_argument("--dt", type=float, default=0.05)
    s.add_argument("--epsilon", type=float, default=1e-10)
    s.add_argument("--max-iterations", type=int, default=5000)
    s.add_argument("--truncate", type=float)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_fit_sir)

    lp = sub.add_parser("lplot", help="L-plot of GLD and SIR estimates against truncation day")
    lp.add_argument("input", type=Path)
    lp.add_argument("--t-conv", type=_t_conv, default=math.inf, help="evaluation day, or 'inf' for the final size")
    lp.add_argument("--N", type=float, help="population for the SIR fits (default: stabilized GLD estimate)")
    lp.add_argument("--s", type=int, default=7)
    lp.add_argument("--start", type=float)
    lp.add_argument("--stop", type=float)
    lp.add_argument("--workers", type=int, default=None, help="processes for per-truncation fits")
    lp.add_argument("--out", type=Path)
    lp.set_defaults(func=cmd_lplot)

    f = sub.add_parser("forecast", help="combined GLD -> SIR forecast")
    f.add_argument("input", type=Path)
    f.add_argument("--horizon", type=int, default=30)
    f.add_argument("--N", type=float, help="override the GLD-derived population")
    f.add_argument("--s", type=int, default=7)
    f.add_argument("--truncate", type=float, help="forecast from this day")
    f.add_argument("--workers", type=int, default=None)
    f.add_argument("--out", type=Path)
    f.set_defaults(func=cmd_forecast)

    sm = sub.add_parser("simulate", help="write synthetic counts in the input format")
    sm.add_argument("--model", choices=("sir", "gld"), default="sir")
    sm.add_argument("--N", type=float, default=None)
    sm.add_argument("--lam", type=float, default=2e-5, help="SIR infection rate")
    sm.add_argument("--gamma", type=float, default=None, help="removal rate")
    sm.add_argument("--I0", type=float, default=10, help="SIR initial infected")
    sm.add_argument("--sigma", type=float, default=5.0)
    sm.add_argument("--mu", type=float, default=30.0)
    sm.add_argument("--beta", type=float, default=0.8)
    sm.add_argument("--fatality", type=float, default=0.0, help="share of removals reported as deaths")
    sm.add_argument("--days", type=int, default=120)
    sm.add_argument("--noise", type=float, default=0.0, help="0: rounded model curve; 1: Poisson counts")
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--out", type=Path, help="output CSV (default stdout)")
    sm.set_defaults(func=cmd_simulate)
    return p


def _fill_simulate_defaults(args: argparse.Namespace) -> None:
    if args.command != "simulate":
        return
    defaults = SirScenario() if args.model == "sir" else GldScenario()
    if args.N is None:
        args.N = defaults.N
    if args.gamma is None:
        args.gamma = defaults.gamma


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    _fill_simulate_defaults(args)
    cfg = RunConfig.from_args(args)
    log.debug("run config %s", asdict(cfg))
    try:
        return args.func(cfg)
    except ValidationError as exc:
        for row, msg in exc.errors:
            print(f"row {row}: {msg}" if row is not None else msg, file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, FileNotFoundError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
