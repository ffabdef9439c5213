"""Synthetic stand-in for the FY92-FY16 model table.

The real table assembled from official sources is not redistributable
here, so tests and the bundled demo run against this clearly-labelled
synthetic one instead. It matches the documented schema and value ranges
(percent units; ProteinExp unavailable from FY14 on) and carries real
structure — support-price and wage growth dominate, the
international-price column is nearly irrelevant, and two pairs interact —
but its numbers are generated, not observed. Conclusions about the actual
economy cannot be drawn from it.

``python -m brt.standin --out table.csv`` writes the table; the same
bytes ship as package data at ``brt/resources/synthetic_standin.csv``.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

import numpy as np

from .data import MODEL_PREDICTORS, Dataset, load_model_table, write_model_table
from .rng import SplitMix64

STANDIN_SEED = 19920401
START_YEAR, END_YEAR = 1992, 2016
PROTEIN_LAST_YEAR = 2013

RESOURCE_NAME = "synthetic_standin.csv"


def _uniform_vector(rng: SplitMix64, n: int, lo: float, hi: float) -> np.ndarray:
    return np.array([lo + (hi - lo) * rng.uniform() for _ in range(n)])


def make_standin() -> Dataset:
    """Deterministically generate the synthetic FY92-FY16 model table."""
    rng = SplitMix64(STANDIN_SEED)
    years = tuple(range(START_YEAR, END_YEAR + 1))
    n = len(years)

    monsdev = np.round(_uniform_vector(rng, n, -24.0, 18.0), 2)
    msp = np.round(_uniform_vector(rng, n, 2.0, 22.0), 2)
    fao = np.round(_uniform_vector(rng, n, -14.0, 30.0), 2)
    fd = np.round(_uniform_vector(rng, n, 4.0, 9.5), 2)
    fwi = np.round(_uniform_vector(rng, n, 2.5, 19.0), 2)
    agril = np.round(_uniform_vector(rng, n, 0.5, 13.0), 2)
    protein = np.round(_uniform_vector(rng, n, -4.5, 8.0), 2)
    noise = _uniform_vector(rng, n, -0.3, 0.3)

    fcpi = (
        1.2
        + 0.34 * msp
        + 0.27 * fwi
        - 0.075 * monsdev
        + 0.10 * agril
        + 0.22 * fd
        + 0.11 * protein
        + 0.012 * fao
        + 0.08 * (msp - 12.0) * (-monsdev) / 10.0
        + 0.07 * (fwi - 10.0) * protein / 4.0
        + noise
    )
    fcpi = np.round(fcpi, 2)

    X = np.column_stack([monsdev, msp, fao, fd, fwi, agril, protein])
    # ProteinExp observations end three years early; the underlying values
    # still shaped FCPI above, they are just not recorded.
    for i, y in enumerate(years):
        if y > PROTEIN_LAST_YEAR:
            X[i, MODEL_PREDICTORS.index("ProteinExp")] = np.nan
    return Dataset(years, MODEL_PREDICTORS, X, fcpi)


def load_bundled() -> Dataset:
    """Read the packaged copy of the stand-in table."""
    ref = resources.files("brt") / "resources" / RESOURCE_NAME
    with ref.open("r", encoding="utf-8") as fh:
        return load_model_table(fh)


def bundled_path() -> str:
    """Filesystem path of the packaged stand-in CSV."""
    return str(resources.files("brt") / "resources" / RESOURCE_NAME)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Write the synthetic stand-in model table.")
    parser.add_argument("--out", default="-", help="output CSV path, or - for stdout")
    args = parser.parse_args(argv)
    dataset = make_standin()
    if args.out == "-":
        write_model_table(dataset, sys.stdout)
    else:
        write_model_table(dataset, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
