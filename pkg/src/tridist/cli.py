"""Batch command-line front end.

Usage:
    tridist plotdata --case within --grid 201 --format csv
    tridist moments --case adjacent
    tridist ks --case hexagon6 --samples 1000000 --seed 3
    tridist fit --case parallel --format csv -o fit.csv

Every command writes one document: CSV (header row, then rows) or a single
JSON object carrying ``command``, ``case``, ``side``, ``seed`` and
``library_version`` next to the results.  Numbers are printed with 12
significant digits.  Exit status is 0 on success, 2 for invalid arguments
and 3 for numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analysis import fit_polynomial, identity_residual_parallel, moments_report
from .distributions import DistanceCase, TriangleDistribution
from .errors import InvalidArgumentError, NumericalFailureError
from .montecarlo import (
    CompositeKind,
    composite_region,
    empirical_cdf,
    ks_statistic,
    ks_threshold,
    region_cdf,
    sample_composite_distances,
    sample_distances,
)

COMMANDS = ("pdf", "cdf", "quantile", "moments", "simulate", "ks", "fit", "identity", "plotdata")
_COMPOSITE_OK = ("simulate", "ks")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    command: str
    case: str = "within"
    side: float = 1.0
    samples: int = 1_000_000
    seed: int = 0
    grid: int = 1001
    fmt: str = "json"
    output: Optional[str] = None
    d: Optional[list[float]] = None
    p: Optional[list[float]] = None
    degree: int = 20
    streams: int = 1
    with_simulation: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise InvalidArgumentError(f"unknown command {self.command!r}")
        if not (np.isfinite(self.side) and self.side > 0):
            raise InvalidArgumentError("--side must be positive")
        if self.samples < 1:
            raise InvalidArgumentError("--samples must be at least 1")
        if self.grid < 2:
            raise InvalidArgumentError("--grid must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("--seed must be an unsigned 64-bit integer")
        if self.fmt not in ("csv", "json"):
            raise InvalidArgumentError("--format must be csv or json")


def fmt_number(x) -> str:
    return format(float(x), ".12g")


def _json_value(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(fmt_number(x))
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in x]
    raise TypeError(f"cannot serialize {type(x)!r}")


def _csv_cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return fmt_number(x)


class _Result:
    """Tabular rows plus scalar fields for one command."""

    def __init__(self, columns, rows, fields=None):
        self.columns = list(columns)
        self.rows = rows
        self.fields = fields or {}


def _resolve_case(config: RunConfig):
    name = config.case.strip().lower()
    if name in {k.value for k in CompositeKind}:
        if config.command not in _COMPOSITE_OK:
            raise InvalidArgumentError(
                f"composite region {name!r} is only available for simulate and ks"
            )
        return CompositeKind.parse(name)
    return DistanceCase.parse(name)


def _grid(lo, hi, n):
    return np.linspace(lo, hi, n)


def _draw(config, target):
    if isinstance(target, CompositeKind):
        region = composite_region(target, config.side)
        sample = sample_composite_distances(region, config.samples, config.seed, config.streams)
        upper = 2.0 * config.side
        return sample, region_cdf(target, config.side), upper
    sample = sample_distances(target, config.side, config.samples, config.seed, config.streams)
    dist = TriangleDistribution(target, config.side)
    return sample, dist.cdf, dist.upper


def _cmd_pdf_cdf(config, target, kind):
    dist = TriangleDistribution(target, config.side)
    d = np.asarray(config.d if config.d else _grid(0.0, dist.upper, config.grid), dtype=float)
    values = getattr(dist, kind)(d)
    return _Result(["d", kind], list(zip(d, np.atleast_1d(values))))


def _cmd_quantile(config, target):
    if not config.p:
        raise InvalidArgumentError("quantile needs at least one --p value")
    dist = TriangleDistribution(target, config.side)
    p = np.asarray(config.p, dtype=float)
    return _Result(["p", "d"], list(zip(p, np.atleast_1d(dist.quantile(p)))))


def _cmd_moments(config, target):
    cols = ["source", "m1", "m2", "variance"]
    if config.with_simulation:
        sample = sample_distances(target, config.side, config.samples, config.seed, config.streams)
        reports = moments_report(target, config.side, sample)
    else:
        reports = (moments_report(target, config.side),)
    rows = [(r.source, r.m1, r.m2, r.variance) for r in reports]
    analytic = reports[0]
    fields = {"m1": analytic.m1, "m2": analytic.m2, "variance": analytic.variance}
    if config.with_simulation:
        sim = reports[1]
        fields["samples"] = config.samples
        fields["simulated"] = {"m1": sim.m1, "m2": sim.m2, "variance": sim.variance}
    return _Result(cols, rows, fields)


def _cmd_simulate(config, target):
    sample, cdf, upper = _draw(config, target)
    d = _grid(0.0, upper, config.grid)
    rows = list(zip(d, empirical_cdf(sample, d), cdf(d)))
    x = sample.distances
    fields = {
        "samples": sample.count,
        "mean": float(np.mean(x)),
        "m2": float(np.mean(x * x)),
        "variance": float(np.var(x)),
        "min": float(x[0]),
        "max": float(x[-1]),
    }
    return _Result(["d", "empirical_cdf", "cdf"], rows, fields)


def _cmd_ks(config, target):
    sample, cdf, _ = _draw(config, target)
    stat = ks_statistic(sample, cdf)
    thr = ks_threshold(sample.count)
    verdict = "pass" if stat < thr else "fail"
    fields = {"samples": sample.count, "statistic": stat, "threshold": thr, "verdict": verdict}
    row = (stat, thr, sample.count, verdict)
    return _Result(["statistic", "threshold", "samples", "verdict"], [row], fields)


def _cmd_fit(config, target):
    dist = TriangleDistribution(target, config.side)
    fit = fit_polynomial(dist, config.degree, config.grid)
    d = fit.grid.values()
    y = dist.pdf(d)
    p = fit(d)
    fields = {
        "degree": fit.degree,
        "coefficients": list(fit.coefficients),
        "grid": {"points": fit.grid.points, "lower": fit.grid.lower, "upper": fit.grid.upper},
        "norm_residuals": fit.norm_residuals,
    }
    return _Result(["d", "pdf", "fit", "residual"], list(zip(d, y, p, p - y)), fields)


def _cmd_identity(config, target):
    d = _grid(0.0, 2.0, config.grid)
    r = identity_residual_parallel(d)
    fields = {"max_abs_residual": float(np.max(np.abs(r)))}
    return _Result(["d", "residual"], list(zip(d, r)), fields)


def _cmd_plotdata(config, target):
    dist = TriangleDistribution(target, config.side)
    d = _grid(0.0, dist.upper, config.grid)
    return _Result(["d", "pdf", "cdf"], list(zip(d, dist.pdf(d), dist.cdf(d))))


_HANDLERS = {
    "pdf": lambda c, t: _cmd_pdf_cdf(c, t, "pdf"),
    "cdf": lambda c, t: _cmd_pdf_cdf(c, t, "cdf"),
    "quantile": _cmd_quantile,
    "moments": _cmd_moments,
    "simulate": _cmd_simulate,
    "ks": _cmd_ks,
    "fit": _cmd_fit,
    "identity": _cmd_identity,
    "plotdata": _cmd_plotdata,
}


def _render_csv(result: _Result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _render_json(config: RunConfig, target, result: _Result) -> str:
    doc = {
        "command": config.command,
        "case": target.value,
        "side": config.side,
        "seed": config.seed,
    }
    doc.update(result.fields)
    if config.command not in ("ks", "moments"):
        doc["columns"] = result.columns
        doc["rows"] = [list(r) for r in result.rows]
    doc["library_version"] = __version__
    return json.dumps(_json_value(doc), indent=2) + "\n"


def run(config: RunConfig) -> str:
    """Execute one command and return the rendered document."""
    config.validate()
    target = _resolve_case(config)
    result = _HANDLERS[config.command](config, target)
    if config.fmt == "csv":
        return _render_csv(result)
    return _render_json(config, target, result)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--case",
        default="within",
        help="within, adjacent, parallel, diagonal (simulate/ks also: rhombus2, bigtriangle4, hexagon6)",
    )
    common.add_argument("--side", type=float, default=1.0, help="triangle side length")
    common.add_argument("--samples", type=int, default=1_000_000, help="random pairs to draw")
    common.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    common.add_argument("--grid", type=int, default=1001, help="grid points")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")
    common.add_argument("-o", "--output", help="write to this path instead of stdout")
    common.add_argument(
        "--streams", type=int, default=1, help="independent RNG streams (changes the sample)"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tridist", description="Random distances associated with equilateral triangles."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common_options()
    parser.subcommands = {}
    helps = {
        "pdf": "evaluate the density",
        "cdf": "evaluate the distribution function",
        "quantile": "invert the distribution function",
        "moments": "first two raw moments and the variance",
        "simulate": "Monte Carlo sample and empirical CDF on a grid",
        "ks": "Kolmogorov-Smirnov check of a sample against the closed form",
        "fit": "least-squares polynomial fit of the density",
        "identity": "residual of the side-2 triangle mixture identity on [0, 2]",
        "plotdata": "d, pdf, cdf on a uniform grid over the support",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
        parser.subcommands[name] = p
        if name in ("pdf", "cdf"):
            p.add_argument("--d", type=float, nargs="+", help="distances (default: grid)")
        elif name == "quantile":
            p.add_argument("--p", type=float, nargs="+", required=True, help="probabilities")
        elif name == "fit":
            p.add_argument("--degree", type=int, default=20)
        elif name == "moments":
            p.add_argument(
                "--with-simulation",
                action="store_true",
                help="add sample moments from --samples pairs",
            )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(
        command=args.command,
        case=args.case,
        side=args.side,
        samples=args.samples,
        seed=args.seed,
        grid=args.grid,
        fmt=args.fmt,
        output=args.output,
        d=getattr(args, "d", None),
        p=getattr(args, "p", None),
        degree=getattr(args, "degree", 20),
        streams=args.streams,
        with_simulation=getattr(args, "with_simulation", False),
    )
    try:
        text = run(config)
    except InvalidArgumentError as exc:
        parser.subcommands[args.command].print_usage(sys.stderr)
        print(f"tridist {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailureError as exc:
        print(f"tridist {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
