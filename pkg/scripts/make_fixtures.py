#!/usr/bin/env python3
"""Regenerate the synthetic HMD-layout fixture files under tests/data/.

The files mimic the 1x1 deaths/exposures layout (title line, blank line,
``Year Age Female Male Total`` header, ages 0..109 plus 110+, "." for
missing) but contain Poisson draws from known Gompertz-Makeham parameters,
so the fit pipeline can be exercised and checked without licensed data.
Deterministic: fixed seeds, fixed hole positions.
"""

import pathlib

import numpy as np

import makeham as mk

OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"

YEARS = (1990, 1991, 1992)
AGES = np.arange(0, 110)

FEMALE = mk.GompertzMakeham(a=4.5e-4, b=0.095, c=4e-3)
MALE = mk.GompertzMakeham(a=6e-4, b=0.092, c=6e-3)

# (year, age) cells punched into the female column to exercise the parser
MISSING_DEATH = (1992, 103)
ZERO_EXPOSURE = (1991, 105)


def _exposure(ages: np.ndarray, scale: float) -> np.ndarray:
    return np.round(scale * np.exp(-ages / 60.0), 2)


def build_tables() -> tuple[list[str], list[str]]:
    rng = np.random.default_rng(20240915)
    death_lines, expo_lines = [], []
    for year in YEARS:
        expo_f = _exposure(AGES, 1.0e5)
        expo_m = _exposure(AGES, 0.97e5)
        mu_f = mk.total_hazard(FEMALE, AGES + 0.5)
        mu_m = mk.total_hazard(MALE, AGES + 0.5)
        # fractional tails imitate registry splitting of unknown-age deaths
        deaths_f = rng.poisson(expo_f * mu_f) + (AGES * 7 + year) % 100 / 100.0
        deaths_m = rng.poisson(expo_m * mu_m) + (AGES * 3 + year) % 100 / 100.0
        for i, age in enumerate(AGES):
            df, dm = f"{deaths_f[i]:.2f}", f"{deaths_m[i]:.2f}"
            ef, em = f"{expo_f[i]:.2f}", f"{expo_m[i]:.2f}"
            dt = f"{deaths_f[i] + deaths_m[i]:.2f}"
            et = f"{expo_f[i] + expo_m[i]:.2f}"
            if (year, age) == MISSING_DEATH:
                df = "."
            if (year, age) == ZERO_EXPOSURE:
                ef = "0.00"
            death_lines.append(f"  {year}    {age:>4}    {df:>12} {dm:>12} {dt:>12}")
            expo_lines.append(f"  {year}    {age:>4}    {ef:>12} {em:>12} {et:>12}")
        # open age interval, dropped by the pipeline
        death_lines.append(f"  {year}    110+    {3.21:>12.2f} {1.23:>12.2f} {4.44:>12.2f}")
        expo_lines.append(f"  {year}    110+    {5.55:>12.2f} {2.22:>12.2f} {7.77:>12.2f}")
    return death_lines, expo_lines


def write(path: pathlib.Path, what: str, lines: list[str]) -> None:
    header = "  Year          Age             Female            Male           Total"
    title = f"Synthravia, {what} (period 1x1),  synthetic fixture"
    path.write_text("\n".join([title, "", header, *lines]) + "\n")
    print(f"wrote {path} ({len(lines)} rows)")


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    death_lines, expo_lines = build_tables()
    write(OUT_DIR / "synthetic_deaths.txt", "Deaths", death_lines)
    write(OUT_DIR / "synthetic_exposures.txt", "Exposures", expo_lines)


if __name__ == "__main__":
    main()
