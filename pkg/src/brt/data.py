"""Dataset schema, CSV ingestion, and the feature-construction pipeline.

The model table is one row per fiscal year: a response column plus any
number of real-valued predictor columns, percent units throughout, with
missing cells allowed in predictors only. Raw source series (price
indices, wages, rainfall, ...) are loaded into per-file annual tables and
combined by ``assemble_model_table`` into the model table via year-on-year
changes, weighted indices, currency conversion, and monsoon deviation.

Fiscal years are keyed by their ending calendar year: the label FY07
means the year ending 31 March 2007 and is stored as 2007.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

RESPONSE_NAME = "FCPI"
MODEL_PREDICTORS = ("MonsDev", "MSP", "FAO", "FD", "FWI", "AgrilInput", "ProteinExp")

DROUGHT_DEVIATION_PCT = -10.0  # monsoon deficiency beyond this marks a drought year

# Raw series files understood by assemble_model_table, with their columns
# (None means: any numeric columns, at least one).
RAW_SCHEMAS: dict[str, tuple[str, ...] | None] = {
    "cpi_food": ("index",),
    "rainfall": ("mm",),
    "msp_prices": None,
    "msp_production": None,
    "fao_usd": ("index",),
    "fx_inr_usd": ("rate",),
    "gdp": ("value",),
    "fiscal_deficit": ("value",),
    "farm_wages": None,
    "agri_input_prices": None,
    "pfce": ("pulses", "oils_oilseeds", "milk_products", "meat_egg_fish", "total_food"),
}

PROTEIN_ITEMS = ("pulses", "oils_oilseeds", "milk_products", "meat_egg_fish")


def fy_label(year: int) -> str:
    return f"FY{year % 100:02d}"


@dataclass(frozen=True)
class Dataset:
    """Rectangular learn sample: one row per fiscal year.

    X holds the predictors (NaN marks a missing cell); y is the response
    and must be fully observed.
    """

    years: tuple[int, ...]
    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    response_name: str = RESPONSE_NAME

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "years", tuple(int(v) for v in self.years))
        object.__setattr__(self, "feature_names", tuple(str(s) for s in self.feature_names))
        n = len(self.years)
        if X.shape != (n, len(self.feature_names)) or y.shape != (n,):
            raise ValueError("years, feature_names, X, y have inconsistent shapes")
        for a, b in zip(self.years, self.years[1:]):
            if b != a + 1:
                raise ValueError(f"year keys must be strictly increasing and contiguous (saw {a} then {b})")
        for i, v in enumerate(y):
            if not math.isfinite(v):
                raise ValueError(f"response missing at {fy_label(self.years[i])}")
        if np.any(np.isinf(X)):
            raise ValueError("predictor values must be finite where present")

    @property
    def n_rows(self) -> int:
        return len(self.years)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @classmethod
    def from_arrays(cls, X, y, feature_names=None, years=None, response_name=RESPONSE_NAME) -> "Dataset":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(y, dtype=np.float64)
        if feature_names is None:
            feature_names = tuple(f"x{i}" for i in range(X.shape[1]))
        if years is None:
            years = tuple(range(1, X.shape[0] + 1))
        return cls(tuple(years), tuple(feature_names), X, y, response_name)


@dataclass(frozen=True)
class AnnualTable:
    """One raw source series: named numeric columns keyed by fiscal year."""

    years: tuple[int, ...]
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        for a, b in zip(self.years, self.years[1:]):
            if b <= a:
                raise ValueError("year keys must be strictly increasing")
        for name, vals in self.columns.items():
            if len(vals) != len(self.years):
                raise ValueError(f"column {name!r} length does not match years")

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def series(self, name: str) -> dict[int, float]:
        return {y: float(v) for y, v in zip(self.years, self.columns[name]) if math.isfinite(v)}


@dataclass
class SeriesTable:
    """Named annual raw tables plus static weight maps (items -> weight)."""

    tables: dict[str, AnnualTable] = field(default_factory=dict)
    weights: dict[str, dict[str, float]] = field(default_factory=dict)

    def require(self, name: str) -> AnnualTable:
        if name not in self.tables:
            raise ValueError(f"missing series: {name}")
        return self.tables[name]


def _parse_cell(raw: str, row: int, col: str) -> float:
    text = raw.strip()
    if text == "" or text.upper() == "NA":
        return float("nan")
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"non-numeric cell at row {row}, column {col!r}: {raw!r}") from None


def _read_rows(source) -> tuple[list[str], list[list[str]]]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError("missing header row")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def load_model_table(source, response_name: str = RESPONSE_NAME) -> Dataset:
    """Read a model-table CSV: columns ``year``, the response, and
    predictors in header order. Missing cells are empty or NA; the
    response must be present in every row."""
    header, body = _read_rows(source)
    if not header or header[0] != "year":
        raise ValueError("missing header: first column must be 'year'")
    if response_name not in header:
        raise ValueError(f"missing header: no {response_name!r} column")
    dupes = {h for h in header if header.count(h) > 1}
    if dupes:
        raise ValueError(f"duplicate columns: {sorted(dupes)}")
    predictors = [h for h in header[1:] if h != response_name]
    if not predictors:
        raise ValueError("model table needs at least one predictor column")

    years: list[int] = []
    rows: list[list[float]] = []
    resp: list[float] = []
    r_idx = header.index(response_name)
    p_idx = [header.index(p) for p in predictors]
    seen = set()
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ValueError(f"row {i} has {len(row)} cells, expected {len(header)}")
        try:
            year = int(row[0].strip())
        except ValueError:
            raise ValueError(f"non-numeric cell at row {i}, column 'year': {row[0]!r}") from None
        if year in seen:
            raise ValueError(f"duplicate year {year}")
        seen.add(year)
        years.append(year)
        rv = _parse_cell(row[r_idx], i, response_name)
        if math.isnan(rv):
            raise ValueError(f"response missing at {fy_label(year)}")
        resp.append(rv)
        rows.append([_parse_cell(row[j], i, header[j]) for j in p_idx])

    order = np.argsort(np.asarray(years))
    years_sorted = tuple(int(years[i]) for i in order)
    X = np.asarray(rows, dtype=np.float64)[order]
    y = np.asarray(resp, dtype=np.float64)[order]
    return Dataset(years_sorted, tuple(predictors), X, y, response_name)


def load_series_csv(source, expected_columns: tuple[str, ...] | None = None) -> AnnualTable:
    """Read one raw series CSV (year + numeric columns) into an AnnualTable.

    When expected_columns is given, the header must match it exactly;
    unknown columns are rejected by name.
    """
    header, body = _read_rows(source)
    if not header or header[0] != "year":
        raise ValueError("missing header: first column must be 'year'")
    cols = header[1:]
    if not cols:
        raise ValueError("series file needs at least one value column")
    dupes = {h for h in header if header.count(h) > 1}
    if dupes:
        raise ValueError(f"duplicate columns: {sorted(dupes)}")
    if expected_columns is not None:
        unknown = [c for c in cols if c not in expected_columns]
        if unknown:
            raise ValueError(f"unknown columns: {unknown} (expected {list(expected_columns)})")
        absent = [c for c in expected_columns if c not in cols]
        if absent:
            raise ValueError(f"missing columns: {absent}")

    years: list[int] = []
    data: list[list[float]] = []
    seen = set()
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ValueError(f"row {i} has {len(row)} cells, expected {len(header)}")
        try:
            year = int(row[0].strip())
        except ValueError:
            raise ValueError(f"non-numeric cell at row {i}, column 'year': {row[0]!r}") from None
        if year in seen:
            raise ValueError(f"duplicate year {year}")
        seen.add(year)
        years.append(year)
        data.append([_parse_cell(row[j + 1], i, cols[j]) for j in range(len(cols))])

    order = np.argsort(np.asarray(years))
    arr = np.asarray(data, dtype=np.float64)[order]
    return AnnualTable(
        years=tuple(int(years[i]) for i in order),
        columns={c: np.ascontiguousarray(arr[:, j]) for j, c in enumerate(cols)},
    )


def load_weights_csv(source) -> dict[str, float]:
    """Read an item,weight CSV into a mapping."""
    header, body = _read_rows(source)
    if header != ["item", "weight"]:
        raise ValueError(f"weights file must have columns ['item', 'weight'], got {header}")
    out: dict[str, float] = {}
    for i, row in enumerate(body, start=2):
        if len(row) != 2:
            raise ValueError(f"row {i} has {len(row)} cells, expected 2")
        item = row[0].strip()
        if item in out:
            raise ValueError(f"duplicate item {item!r}")
        w = _parse_cell(row[1], i, "weight")
        if not math.isfinite(w) or w < 0:
            raise ValueError(f"weight for {item!r} must be a nonnegative number")
        out[item] = w
    if not out:
        raise ValueError("weights file is empty")
    return out


def _fmt(v: float) -> str:
    if math.isnan(v):
        return ""
    return repr(float(v))


def write_model_table(dataset: Dataset, sink) -> None:
    """Write a Dataset back to model-table CSV (missing cells empty)."""
    lines = ["year," + dataset.response_name + "," + ",".join(dataset.feature_names)]
    for i, year in enumerate(dataset.years):
        cells = [str(year), _fmt(float(dataset.y[i]))]
        cells += [_fmt(float(v)) for v in dataset.X[i]]
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# transforms


def yoy_change(series: dict[int, float]) -> dict[int, float]:
    """Year-on-year percent change; the first year drops out.

    out(t) = 100 * (x(t) - x(t-1)) / x(t-1), defined only across
    consecutive years. All values must be positive.
    """
    if len(series) < 2:
        raise ValueError("need at least 2 consecutive years")
    years = sorted(series)
    for y in years:
        if not series[y] > 0:
            raise ValueError(f"nonpositive index value at {fy_label(y)}")
    out: dict[int, float] = {}
    for prev, cur in zip(years, years[1:]):
        if cur == prev + 1:
            out[cur] = 100.0 * (series[cur] - series[prev]) / series[prev]
    if not out:
        raise ValueError("need at least 2 consecutive years")
    return out


def weighted_index(
    prices: dict[str, dict[int, float]],
    weights: dict[str, float],
    base_year: int,
) -> dict[int, float]:
    """Fixed-weight price index: 100 * sum(w*p(t)) / sum(w*p(base)).

    Weights are normalised internally, so any positive rescaling of all
    weights leaves the index unchanged. Every weighted item must appear in
    prices and vice versa.
    """
    missing = sorted(set(weights) - set(prices))
    if missing:
        raise ValueError(f"weighted items absent from prices: {missing}")
    extra = sorted(set(prices) - set(weights))
    if extra:
        raise ValueError(f"price items without weights: {extra}")
    wsum = sum(weights.values())
    if not wsum > 0:
        raise ValueError("weights must sum to a positive value")
    items = sorted(weights)
    years = set.intersection(*(set(prices[c]) for c in items))
    if base_year not in years:
        raise ValueError(f"base year {fy_label(base_year)} not covered by all price series")
    base = sum(weights[c] * prices[c][base_year] for c in items)
    if not base > 0:
        raise ValueError("nonpositive base-year basket value")
    return {y: 100.0 * sum(weights[c] * prices[c][y] for c in items) / base for y in sorted(years)}


def fao_inr(fao_usd_index: dict[int, float], fx_inr_per_usd: dict[int, float]) -> dict[int, float]:
    """USD-denominated index converted to rupee terms (elementwise product)."""
    missing = sorted(set(fao_usd_index) - set(fx_inr_per_usd))
    if missing:
        raise ValueError(f"fx rate missing for years: {[fy_label(y) for y in missing]}")
    for name, series in (("index", fao_usd_index), ("fx", fx_inr_per_usd)):
        for y, v in series.items():
            if not v > 0:
                raise ValueError(f"nonpositive {name} value at {fy_label(y)}")
    return {y: fao_usd_index[y] * fx_inr_per_usd[y] for y in sorted(fao_usd_index)}


def monsoon_deviation(
    rainfall: dict[int, float], long_term_mean: float
) -> tuple[dict[int, float], dict[int, bool]]:
    """Percent deviation from the long-term mean, plus drought flags.

    A year is flagged as drought when the deviation is below -10 percent
    (strict: exactly -10 is not a drought).
    """
    if not long_term_mean > 0:
        raise ValueError("long-term mean must be positive")
    dev = {y: 100.0 * (r - long_term_mean) / long_term_mean for y, r in sorted(rainfall.items())}
    drought = {y: d < DROUGHT_DEVIATION_PCT for y, d in dev.items()}
    return dev, drought


# ---------------------------------------------------------------------------
# assembly


def load_raw_directory(raw_dir) -> SeriesTable:
    """Load every known raw series CSV found in a directory."""
    raw_dir = Path(raw_dir)
    table = SeriesTable()
    for name, schema in RAW_SCHEMAS.items():
        path = raw_dir / f"{name}.csv"
        if path.exists():
            try:
                table.tables[name] = load_series_csv(path, schema)
            except ValueError as e:
                raise ValueError(f"{path.name}: {e}") from None
    wpath = raw_dir / "agri_input_weights.csv"
    if wpath.exists():
        table.weights["agri_input"] = load_weights_csv(wpath)
    return table


def assemble_model_table(
    series: SeriesTable,
    rain_mean: float | None = None,
    msp_weight_year: int = 2005,
) -> tuple[Dataset, str]:
    """Build the model Dataset from raw series; returns (dataset, provenance).

    The usable year span is inferred: the run of consecutive years on which
    the response and every required predictor except ProteinExp are
    defined. ProteinExp joins where available and is missing elsewhere.
    MSP weights are the production shares of ``msp_weight_year``; rainfall
    deviation uses ``rain_mean`` or, if omitted, the mean over all supplied
    rainfall years.
    """
    required = [n for n in RAW_SCHEMAS]
    missing = [n for n in required if n not in series.tables]
    if missing:
        raise ValueError(f"missing series: {', '.join(missing)}")
    if "agri_input" not in series.weights:
        raise ValueError("missing series: agri_input_weights")

    prov: list[str] = []

    fcpi = yoy_change(series.tables["cpi_food"].series("index"))
    prov.append("FCPI: yoy_change(cpi_food.index)")

    rain = series.tables["rainfall"].series("mm")
    if not rain:
        raise ValueError("rainfall series is empty")
    mean = rain_mean if rain_mean is not None else sum(rain.values()) / len(rain)
    monsdev, drought = monsoon_deviation(rain, mean)
    prov.append(
        f"MonsDev: monsoon_deviation(rainfall.mm, long_term_mean={mean!r})"
        + ("" if rain_mean is not None else " [mean over supplied years]")
    )

    prices_tbl = series.tables["msp_prices"]
    prod_tbl = series.tables["msp_production"]
    crop_prices = {c: prices_tbl.series(c) for c in prices_tbl.columns}
    if msp_weight_year not in prod_tbl.years:
        raise ValueError(f"MSP weight year {fy_label(msp_weight_year)} not in msp_production")
    wrow = {c: prod_tbl.series(c).get(msp_weight_year, float("nan")) for c in prod_tbl.columns}
    if any(math.isnan(v) for v in wrow.values()):
        raise ValueError(f"msp_production has missing cells at {fy_label(msp_weight_year)}")
    price_years = set.intersection(*(set(s) for s in crop_prices.values()))
    if not price_years:
        raise ValueError("msp_prices has no year covered by every crop")
    msp_base = min(price_years)
    msp_index = weighted_index(crop_prices, wrow, msp_base)
    msp = yoy_change(msp_index)
    prov.append(
        f"MSP: yoy_change(weighted_index(msp_prices, weights=production shares {fy_label(msp_weight_year)},"
        f" base={fy_label(msp_base)})) [YoY is base-invariant]"
    )

    fao = yoy_change(fao_inr(series.tables["fao_usd"].series("index"), series.tables["fx_inr_usd"].series("rate")))
    prov.append("FAO: yoy_change(fao_usd.index * fx_inr_usd.rate)")

    gdp = series.tables["gdp"].series("value")
    deficit = series.tables["fiscal_deficit"].series("value")
    fd = {}
    for y in sorted(set(gdp) & set(deficit)):
        if not gdp[y] > 0:
            raise ValueError(f"nonpositive GDP at {fy_label(y)}")
        fd[y] = 100.0 * deficit[y] / gdp[y]
    prov.append("FD: 100 * fiscal_deficit.value / gdp.value")

    wages_tbl = series.tables["farm_wages"]
    ops = sorted(wages_tbl.columns)
    wage_series = {op: wages_tbl.series(op) for op in ops}
    wage_years = set.intersection(*(set(s) for s in wage_series.values()))
    wage_mean = {y: sum(wage_series[op][y] for op in ops) / len(ops) for y in sorted(wage_years)}
    fwi = yoy_change(wage_mean)
    prov.append(f"FWI: yoy_change(mean of farm_wages[{', '.join(ops)}]) [unweighted operations mean]")

    ai_tbl = series.tables["agri_input_prices"]
    ai_prices = {c: ai_tbl.series(c) for c in ai_tbl.columns}
    ai_years = set.intersection(*(set(s) for s in ai_prices.values()))
    ai_base = min(ai_years)
    agril = yoy_change(weighted_index(ai_prices, series.weights["agri_input"], ai_base))
    prov.append(f"AgrilInput: yoy_change(weighted_index(agri_input_prices, agri_input_weights, base={fy_label(ai_base)}))")

    pfce_tbl = series.tables["pfce"]
    ratio: dict[int, float] = {}
    for i, y in enumerate(pfce_tbl.years):
        parts = [float(pfce_tbl.columns[c][i]) for c in PROTEIN_ITEMS]
        total = float(pfce_tbl.columns["total_food"][i])
        if any(math.isnan(v) for v in parts) or math.isnan(total):
            continue
        if not total > 0:
            raise ValueError(f"nonpositive total_food at {fy_label(y)}")
        ratio[y] = 100.0 * sum(parts) / total
    protein = yoy_change(ratio) if len(ratio) >= 2 else {}
    prov.append("ProteinExp: yoy_change(100 * sum(pfce protein items) / pfce.total_food) [missing where PFCE ends]")

    core = {"FCPI": fcpi, "MonsDev": monsdev, "MSP": msp, "FAO": fao, "FD": fd, "FWI": fwi, "AgrilInput": agril}
    common = set.intersection(*(set(s) for s in core.values()))
    if not common:
        raise ValueError("no year is covered by all required series")
    years = _longest_consecutive_run(sorted(common))

    X = np.empty((len(years), len(MODEL_PREDICTORS)))
    for j, name in enumerate(MODEL_PREDICTORS):
        src = protein if name == "ProteinExp" else core[name]
        X[:, j] = [src.get(y, float("nan")) for y in years]
    y_vec = np.asarray([fcpi[y] for y in years])

    droughts = [fy_label(y) for y in years if drought.get(y)]
    prov.append(f"rows: {fy_label(years[0])}-{fy_label(years[-1])} ({len(years)} fiscal years)")
    prov.append("drought years (monsoon deficient beyond 10%): " + (", ".join(droughts) if droughts else "none"))

    dataset = Dataset(tuple(years), MODEL_PREDICTORS, X, y_vec)
    return dataset, "\n".join(prov) + "\n"


def _longest_consecutive_run(years: list[int]) -> list[int]:
    best: list[int] = []
    run: list[int] = []
    for y in years:
        if run and y == run[-1] + 1:
            run.append(y)
        else:
            run = [y]
        if len(run) > len(best):
            best = run
    return best
