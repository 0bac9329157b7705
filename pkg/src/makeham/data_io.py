"""Parsing of HMD-layout life tables and CSV output of fit results.

The input layout is the Human Mortality Database 1x1 text format: a title
line, a blank line, a ``Year Age Female Male Total`` header, then
whitespace-separated rows where age runs 0..109 plus an open interval
("110+") and missing values are written as ".". No HMD data ships with the
package; synthetic fixtures in the same layout exercise the full pipeline.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .estimation import FitResult, LifeTableSlice
from .models import family_name, parameters

__all__ = [
    "HmdRow",
    "HmdTable",
    "HmdFormatError",
    "HmdParseError",
    "TableAlignmentError",
    "RESULT_COLUMNS",
    "parse_hmd",
    "read_hmd_file",
    "build_slices",
    "write_results",
]

_KINDS = ("deaths", "exposures")
_HEADER = ("Year", "Age", "Female", "Male", "Total")


class HmdFormatError(ValueError):
    """File does not follow the expected overall layout."""


class HmdParseError(ValueError):
    """A data row could not be parsed; message carries the line number."""


class TableAlignmentError(ValueError):
    """Deaths and exposures tables do not cover the same (year, age) keys."""


@dataclass(frozen=True)
class HmdRow:
    year: int
    age: int
    open_interval: bool
    female: float | None
    male: float | None
    total: float | None


@dataclass
class HmdTable:
    kind: str
    title: str
    rows: list[HmdRow]


def _parse_value(token: str) -> float | None:
    if token == ".":
        return None
    return float(token)


def parse_hmd(stream, kind: str) -> HmdTable:
    """Parse one HMD-layout table from a text stream."""
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    lines = stream.read().splitlines()
    if len(lines) < 3:
        raise HmdFormatError("file too short for HMD layout")
    title = lines[0].strip()
    if not title:
        raise HmdFormatError("missing title line")
    if lines[1].strip():
        raise HmdFormatError("expected a blank line after the title")
    if tuple(lines[2].split()) != _HEADER:
        raise HmdFormatError(f"expected column header {' '.join(_HEADER)!r}")

    rows: list[HmdRow] = []
    for line_no, line in enumerate(lines[3:], start=4):
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) != 5:
            raise HmdParseError(f"line {line_no}: expected 5 fields, got {len(tokens)}")
        try:
            year = int(tokens[0])
            age_token = tokens[1]
            if age_token.endswith("+"):
                age, open_interval = int(age_token[:-1]), True
            else:
                age, open_interval = int(age_token), False
            female, male, total = (_parse_value(t) for t in tokens[2:5])
        except ValueError as exc:
            raise HmdParseError(f"line {line_no}: {exc}") from None
        rows.append(HmdRow(year, age, open_interval, female, male, total))
    return HmdTable(kind=kind, title=title, rows=rows)


def read_hmd_file(path, kind: str) -> HmdTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_hmd(fh, kind)


def build_slices(
    deaths: HmdTable,
    exposures: HmdTable,
    min_age: int = 20,
    sexes=("female", "male"),
    population_label: str | None = None,
) -> list[LifeTableSlice]:
    """Join deaths and exposures into per-(year, sex) slices.

    Rows below ``min_age`` and the open age interval are dropped; rows with
    a missing value or zero exposure are dropped and counted on the slice.
    Both tables must cover exactly the same (year, age) keys.
    """
    wanted = [s for s in ("female", "male", "total") if s in set(sexes)]
    death_map = {(r.year, r.age, r.open_interval): r for r in deaths.rows}
    expo_map = {(r.year, r.age, r.open_interval): r for r in exposures.rows}
    if set(death_map) != set(expo_map):
        missing = set(death_map) ^ set(expo_map)
        raise TableAlignmentError(
            f"deaths and exposures disagree on {len(missing)} (year, age) keys"
        )
    label = population_label
    if label is None:
        label = deaths.title.split(",")[0].strip() or "unknown"

    slices: list[LifeTableSlice] = []
    years = sorted({key[0] for key in death_map})
    for year in years:
        keys = sorted(
            (k for k in death_map if k[0] == year and not k[2] and k[1] >= min_age),
            key=lambda k: k[1],
        )
        for sex in wanted:
            ages, dead, expo = [], [], []
            excluded = 0
            for key in keys:
                d = getattr(death_map[key], sex)
                e = getattr(expo_map[key], sex)
                if d is None or e is None or e <= 0:
                    excluded += 1
                    continue
                ages.append(float(key[1]))
                dead.append(d)
                expo.append(e)
            slices.append(
                LifeTableSlice(label, year, sex, ages, dead, expo, n_excluded=excluded)
            )
    return slices


RESULT_COLUMNS = (
    "population,year,sex,family,a,b,c,gamma,k,a1,b1,"
    "log_posterior,converged,pi,threshold_age,modal_age_senescent,modal_age_overall"
).split(",")

# optional per-family parameters; Siler's senescent pair feeds the a/b columns
_OPTIONAL_PARAM_MAP = {
    "gm": {},
    "kannisto": {},
    "ggm": {"gamma": "gamma"},
    "beard": {"k": "k"},
    "siler": {"a1": "a1", "b1": "b1"},
}


def _fmt(value) -> str:
    return repr(float(value))


def _result_row(result: FitResult) -> list[str]:
    family = family_name(result.model)
    params = parameters(result.model)
    if family == "siler":
        core = {"a": params["a2"], "b": params["b2"], "c": params["c"]}
    else:
        core = {"a": params["a"], "b": params["b"], "c": params["c"]}
    extra = {col: params[name] for name, col in _OPTIONAL_PARAM_MAP[family].items()}
    row = {
        "population": result.population_label,
        "year": str(result.year),
        "sex": result.sex,
        "family": family,
        "a": _fmt(core["a"]),
        "b": _fmt(core["b"]),
        "c": _fmt(core["c"]),
        "gamma": _fmt(extra["gamma"]) if "gamma" in extra else "",
        "k": _fmt(extra["k"]) if "k" in extra else "",
        "a1": _fmt(extra["a1"]) if "a1" in extra else "",
        "b1": _fmt(extra["b1"]) if "b1" in extra else "",
        "log_posterior": _fmt(result.log_posterior),
        "converged": str(bool(result.converged)).lower(),
        "pi": _fmt(result.derived.pi),
        "threshold_age": _fmt(result.derived.threshold_age),
        "modal_age_senescent": _fmt(result.derived.modal_age_senescent),
        "modal_age_overall": _fmt(result.derived.modal_age_overall),
    }
    return [row[col] for col in RESULT_COLUMNS]


def write_results(results, destination) -> int:
    """Write fit results as CSV; returns the number of result rows."""
    close = False
    if isinstance(destination, (str, bytes)):
        fh = open(destination, "w", newline="")
        close = True
    else:
        fh = destination
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        count = 0
        for result in results:
            writer.writerow(_result_row(result))
            count += 1
        return count
    finally:
        if close:
            fh.close()
