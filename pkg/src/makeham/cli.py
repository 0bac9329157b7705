"""Command-line front door: evaluate, decompose, fit, simulate.

Single-object results are emitted as JSON, tables as CSV, so runs diff and
pipe cleanly. Every command is deterministic given its full flag set. Exit
codes: 0 success, 1 usage or validation problem, 2 partial batch failure,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import data_io, estimation, mixture, models, simulation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2
EXIT_IO = 3

_MODEL_PARAMS = ("a", "b", "c", "gamma", "k", "a1", "b1", "a2", "b2")

_REQUIRED_BY_FAMILY = {
    "gm": ("a", "b", "c"),
    "ggm": ("a", "b", "gamma", "c"),
    "beard": ("a", "b", "k", "c"),
    "kannisto": ("a", "b", "c"),
    "siler": ("a1", "b1", "a2", "b2", "c"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract reserves 2 for
    # partial batch failures
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(path: str) -> dict[str, str]:
    """Flat key=value file; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{line_no}: expected key=value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _resolve(ns: argparse.Namespace, spec: dict[str, tuple]) -> None:
    """Fill every option as: flag if given, else config value, else default."""
    config = _load_config(ns.config) if getattr(ns, "config", None) else {}
    for key, (convert, default) in spec.items():
        value = getattr(ns, key, None)
        if value is None:
            raw = config.get(key)
            value = convert(raw) if raw is not None else default
        setattr(ns, key, value)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=sorted(models.FAMILIES), default=None)
    for name in _MODEL_PARAMS:
        parser.add_argument(f"--{name}", type=float, default=None)
    parser.add_argument("--config", default=None, help="flat key=value config file")


_MODEL_SPEC = {"family": (str, "gm"), **{p: (float, None) for p in _MODEL_PARAMS}}


def _model_from_args(ns: argparse.Namespace) -> models.HazardModel:
    family = ns.family
    if family not in _REQUIRED_BY_FAMILY:
        raise UsageError(f"unknown family {family!r}")
    values = []
    missing = []
    for name in _REQUIRED_BY_FAMILY[family]:
        value = getattr(ns, name)
        if value is None:
            missing.append(f"--{name}")
        else:
            values.append(value)
    if missing:
        raise UsageError(f"family {family!r} needs {', '.join(missing)}")
    model = models.from_params(family, values)
    report = models.validate(model)
    if not report.ok:
        raise UsageError("invalid parameters: " + "; ".join(report.violations))
    return model


def _parse_age_grid(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise UsageError(f"--ages expects lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError("--ages needs step > 0 and hi >= lo")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _json_safe(value):
    if value is None or isinstance(value, str):
        return value
    value = float(value)
    return None if math.isnan(value) else value


def cmd_eval(ns: argparse.Namespace) -> int:
    _resolve(ns, {**_MODEL_SPEC, "ages": (str, "0:110:0.5")})
    model = _model_from_args(ns)
    grid = _parse_age_grid(ns.ages)
    pi = mixture.mixing_proportion(model)
    s = models.survival(model, grid)
    h = models.baseline_hazard(model, grid)
    hazard = h + model.c
    f = models.density(model, grid)
    g1 = (model.c / pi) * s if pi > 0 else np.zeros_like(grid)
    g2 = h * s / (1.0 - pi)
    p = model.c / (h + model.c)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["age", "hazard", "survival", "density", "g1", "g2", "p(x)"])
    for row in zip(grid, hazard, s, f, g1, g2, p):
        writer.writerow([repr(float(v)) for v in row])
    return EXIT_OK


def cmd_decompose(ns: argparse.Namespace) -> int:
    _resolve(
        ns,
        {
            **_MODEL_SPEC,
            "grid_step": (float, mixture.DEFAULT_GRID_STEP),
            "grid_max": (float, mixture.DEFAULT_GRID_MAX),
        },
    )
    model = _model_from_args(ns)
    grid = np.arange(0.0, ns.grid_max + 1e-9, ns.grid_step)
    summary = mixture.decompose(model, grid)
    payload = {
        "family": models.family_name(model),
        "parameters": models.parameters(model),
        "pi": _json_safe(summary.pi),
        "threshold_age": _json_safe(summary.threshold_age),
        "modal_age_overall": _json_safe(summary.modal_age_overall),
        "modal_age_senescent": _json_safe(summary.modal_age_senescent),
        "modal_age_premature": _json_safe(summary.modal_age_premature),
    }
    if ns.grid_out:
        with open(ns.grid_out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["age", "p(x)", "g1", "g2", "f"])
            for (age, p), (_, g1, g2, f) in zip(
                summary.prevalence_grid, summary.component_density_grid
            ):
                writer.writerow([repr(v) for v in (age, p, g1, g2, f)])
        payload["grid_path"] = ns.grid_out
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _parse_priors(entries) -> estimation.PriorSpec | None:
    if not entries:
        return None
    table = {}
    for entry in entries:
        parts = entry.split(":")
        if len(parts) != 3:
            raise UsageError(f"--prior expects name:alpha:beta, got {entry!r}")
        name, alpha, beta = parts[0], float(parts[1]), float(parts[2])
        table[name] = (alpha, beta)
    return estimation.PriorSpec(table)


def cmd_fit(ns: argparse.Namespace) -> int:
    _resolve(
        ns,
        {
            "family": (str, "gm"),
            "min_age": (int, 20),
            "sexes": (str, "female,male"),
            "starts": (int, 16),
            "seed": (int, 0),
            "max_iter": (int, 2000),
        },
    )
    sexes = tuple(s.strip() for s in ns.sexes.split(",") if s.strip())
    deaths = data_io.read_hmd_file(ns.deaths, "deaths")
    exposures = data_io.read_hmd_file(ns.exposures, "exposures")
    panel = data_io.build_slices(deaths, exposures, min_age=ns.min_age, sexes=sexes)
    options = estimation.FitOptions(
        min_age=ns.min_age, n_starts=ns.starts, max_iter=ns.max_iter, seed=ns.seed
    )
    results, failures = estimation.fit_series(
        panel, ns.family, priors=_parse_priors(ns.prior), options=options
    )
    if ns.out:
        data_io.write_results(results, ns.out)
    else:
        data_io.write_results(results, sys.stdout)
    for failure in failures:
        print(
            f"failed: {failure.population_label} {failure.year} {failure.sex}: "
            f"{failure.error}",
            file=sys.stderr,
        )
    all_converged = all(r.converged for r in results)
    return EXIT_OK if not failures and all_converged else EXIT_PARTIAL


def cmd_simulate(ns: argparse.Namespace) -> int:
    _resolve(ns, {**_MODEL_SPEC, "n": (int, 100000), "seed": (int, 0)})
    if ns.n < 1:
        raise UsageError("--n must be >= 1")
    model = _model_from_args(ns)
    causes = simulation.competing_causes(model)
    cohort = simulation.simulate_cohort(causes, ns.n, ns.seed)
    analytic_pi = mixture.mixing_proportion(model)
    summary = {
        "n": ns.n,
        "seed": ns.seed,
        "causes": list(cohort.cause_labels),
        "n_censored": cohort.n_censored,
        "analytic_pi": analytic_pi,
        "empirical_pi": {},
    }
    for label in cohort.cause_labels:
        value, se = simulation.empirical_pi(cohort, label)
        summary["empirical_pi"][label] = {"value": value, "se": se}
    if "premature" in cohort.cause_labels:
        emp = summary["empirical_pi"]["premature"]
        summary["abs_error"] = abs(emp["value"] - analytic_pi)
        summary["within_3_se"] = bool(summary["abs_error"] <= 3.0 * emp["se"])
    if ns.samples_out:
        cohort.to_csv(ns.samples_out)
        summary["samples_path"] = ns.samples_out
    out = sys.stdout
    if ns.summary_out:
        with open(ns.summary_out, "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(summary, out, indent=2)
        out.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="makeham", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="tabulate hazard/survival/density and components")
    _add_model_flags(p_eval)
    p_eval.add_argument("--ages", default=None, help="grid as lo:hi:step (default 0:110:0.5)")
    p_eval.set_defaults(handler=cmd_eval)

    p_dec = sub.add_parser("decompose", help="mixture summary as JSON")
    _add_model_flags(p_dec)
    p_dec.add_argument("--grid-step", dest="grid_step", type=float, default=None)
    p_dec.add_argument("--grid-max", dest="grid_max", type=float, default=None)
    p_dec.add_argument("--grid-out", dest="grid_out", default=None,
                       help="also write the age grid as CSV to this path")
    p_dec.set_defaults(handler=cmd_decompose)

    p_fit = sub.add_parser("fit", help="MAP-fit a family to HMD-layout deaths/exposures")
    p_fit.add_argument("--deaths", required=True)
    p_fit.add_argument("--exposures", required=True)
    p_fit.add_argument("--family", choices=sorted(models.FAMILIES), default=None)
    p_fit.add_argument("--min-age", dest="min_age", type=int, default=None)
    p_fit.add_argument("--sexes", default=None, help="comma list from female,male,total")
    p_fit.add_argument("--starts", type=int, default=None)
    p_fit.add_argument("--seed", type=int, default=None)
    p_fit.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p_fit.add_argument("--prior", action="append", default=None,
                       help="override one prior as name:alpha:beta (repeatable)")
    p_fit.add_argument("--out", default=None, help="results CSV path (default stdout)")
    p_fit.add_argument("--config", default=None)
    p_fit.set_defaults(handler=cmd_fit)

    p_sim = sub.add_parser("simulate", help="competing-risk Monte Carlo cohort")
    _add_model_flags(p_sim)
    p_sim.add_argument("--n", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--samples-out", dest="samples_out", default=None)
    p_sim.add_argument("--summary-out", dest="summary_out", default=None)
    p_sim.set_defaults(handler=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.handler(ns)
    except UsageError as exc:
        print(f"makeham: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (data_io.HmdFormatError, data_io.HmdParseError, data_io.TableAlignmentError) as exc:
        print(f"makeham: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"makeham: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
