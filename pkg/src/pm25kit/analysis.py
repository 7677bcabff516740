"""The five studies run over a Dataset, plus their serializable reports.

Every study accounts for every country: a country either contributes to
the results or is listed in ``exclusions`` with a reason.
"""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from . import arima
from .clustering import ClusterModel, ElbowCurve, elbow_curve, label_clusters
from .data_model import DEATH_YEARS, OBSERVED_YEARS, CountryRecord, Dataset, FillPolicy, Region
from .errors import DegenerateFitError, DegenerateInputError, EmptyStudyError, InsufficientDataError
from .stats_metrics import MetricsBundle, evaluate_forecasts, pearson, standardize

# Published reference values, used only for side-by-side comparison.
REFERENCE_METRICS = {"mae": 3.99, "mse": 33.80, "rmse": 5.81, "r_squared": 0.86}
REFERENCE_CENTERS = {"Low": 20.74, "Moderate": 41.09, "High": 76.80}
REFERENCE_CORRELATIONS = {"density": -0.20, "deaths": 0.63, "deaths-2021": 0.57}

EXCLUDE_NOTE = ("Correlations always use exclude semantics: missing values are dropped, "
                "never zero-filled.")


@dataclass(frozen=True)
class Exclusion:
    country: str
    reason: str


# --------------------------------------------------------------------------
# regional averages


@dataclass(frozen=True)
class RegionalTrendTable:
    means: dict[tuple[Region, int], float]
    counts: dict[tuple[Region, int], int]
    years: tuple[int, ...]
    per_country: dict[str, dict[int, float]]
    exclusions: tuple[Exclusion, ...] = ()

    def mean(self, region: Region, year: int) -> float | None:
        return self.means.get((region, year))

    def rows(self) -> list[dict]:
        return [{"region": r.value, "year": y, "mean": self.means[(r, y)], "countries": self.counts[(r, y)]}
                for r in Region for y in self.years if (r, y) in self.means]


def _regional_means(records, values_of, years) -> tuple[dict, dict]:
    acc: dict[tuple[Region, int], list[float]] = defaultdict(list)
    for rec in records:
        for year, value in values_of(rec).items():
            if year in years:
                acc[(rec.region, year)].append(value)
    means = {key: float(np.mean(vals)) for key, vals in acc.items()}
    counts = {key: len(vals) for key, vals in acc.items()}
    return means, counts


def regional_trends(ds: Dataset) -> RegionalTrendTable:
    """Per-region, per-year mean PM2.5 following ``ds.fill_policy``.

    Cells with no contributing country are absent rather than 0.
    """
    if not len(ds):
        raise EmptyStudyError("dataset is empty")
    years = tuple(OBSERVED_YEARS)

    def values_of(rec: CountryRecord) -> dict[int, float]:
        return {y: v for y, v in rec.pm25.items() if y in years}

    means, counts = _regional_means(ds, values_of, years)
    per_country, exclusions = {}, []
    for rec in ds:
        vals = values_of(rec)
        if vals:
            per_country[rec.country] = vals
        else:
            exclusions.append(Exclusion(rec.country, "no PM2.5 values 2018-2023"))
    return RegionalTrendTable(means, counts, years, per_country, tuple(exclusions))


# --------------------------------------------------------------------------
# death rates


@dataclass(frozen=True)
class DeathRateSummary:
    regional: RegionalTrendTable
    south_asia: dict[str, dict[int, float]]
    exclusions: tuple[Exclusion, ...]


def death_rate_summary(ds: Dataset) -> DeathRateSummary:
    if not any(len(rec.deaths) for rec in ds):
        raise EmptyStudyError("no death-rate values in the dataset; supply a CSV with Death_2018..Death_2021 columns")
    years = tuple(DEATH_YEARS)
    means, counts = _regional_means(ds, lambda r: dict(r.deaths), years)
    per_country = {rec.country: dict(rec.deaths) for rec in ds if len(rec.deaths)}
    exclusions = tuple(Exclusion(rec.country, "no death-rate values 2018-2021") for rec in ds if not len(rec.deaths))
    south = {c: v for c, v in per_country.items() if ds[c].region is Region.SOUTH_ASIA}
    return DeathRateSummary(RegionalTrendTable(means, counts, years, per_country, exclusions), south, exclusions)


# --------------------------------------------------------------------------
# correlations


@dataclass(frozen=True)
class CorrelationResult:
    study: str
    r: float
    n: int
    x_label: str
    y_label: str
    pairs: tuple[tuple[str, Region, float, float], ...]
    per_region: dict[Region, float | None]
    exclusions: tuple[Exclusion, ...]
    parameters: dict = field(default_factory=dict)


def _correlate(study, pairs, exclusions, x_label, y_label, parameters) -> CorrelationResult:
    if len(pairs) < 2:
        raise EmptyStudyError(f"{study}: need at least 2 countries with both {x_label} and {y_label}, "
                              f"found {len(pairs)}")
    r = pearson([p[2] for p in pairs], [p[3] for p in pairs])
    per_region: dict[Region, float | None] = {}
    for region in Region:
        sub = [p for p in pairs if p[1] is region]
        try:
            per_region[region] = pearson([p[2] for p in sub], [p[3] for p in sub])
        except DegenerateInputError:
            per_region[region] = None
    return CorrelationResult(study, r, len(pairs), x_label, y_label, tuple(pairs), per_region,
                             tuple(exclusions), parameters)


def corr_density_pm25(ds: Dataset, year: int = 2023) -> CorrelationResult:
    """Pearson between population density and PM2.5 in ``year``."""
    ds = ds.with_policy(FillPolicy.EXCLUDE)
    pairs, excl = [], []
    for rec in ds:
        pm = rec.pm25.get(year)
        if rec.density is None:
            excl.append(Exclusion(rec.country, "no population density (population or area missing)"))
        elif pm is None:
            excl.append(Exclusion(rec.country, f"no PM2.5 value for {year}"))
        else:
            pairs.append((rec.country, rec.region, rec.density, pm))
    return _correlate("density", pairs, excl, "population density (per km2)", f"PM2.5 {year}",
                      {"year": year})


def corr_pm25_deaths(ds: Dataset, pm25_window: tuple[int, int] = (2018, 2023),
                     scheme: Literal["country", "region"] = "country") -> CorrelationResult:
    """Pearson between mean PM2.5 over ``pm25_window`` and mean 2018-2021
    death rate.

    ``scheme="country"`` correlates one point per country; ``"region"``
    first averages the per-country means within each region.
    """
    ds = ds.with_policy(FillPolicy.EXCLUDE)
    lo, hi = pm25_window
    study = "deaths" if (lo, hi) == (2018, 2023) else f"deaths-{hi}"
    pairs, excl = [], []
    for rec in ds:
        pm = [v for y, v in rec.pm25.items() if lo <= y <= hi]
        dr = list(rec.deaths.values())
        if not pm:
            excl.append(Exclusion(rec.country, f"no PM2.5 values {lo}-{hi}"))
        elif not dr:
            excl.append(Exclusion(rec.country, "no death-rate values 2018-2021"))
        else:
            pairs.append((rec.country, rec.region, float(np.mean(pm)), float(np.mean(dr))))
    params = {"pm25_window": [lo, hi], "death_window": [DEATH_YEARS.start, DEATH_YEARS.stop - 1],
              "scheme": scheme}
    if scheme == "region":
        grouped: dict[Region, list] = defaultdict(list)
        for p in pairs:
            grouped[p[1]].append(p)
        pairs = [(region.value, region, float(np.mean([p[2] for p in g])), float(np.mean([p[3] for p in g])))
                 for region, g in ((r, grouped[r]) for r in Region) if g]
    elif scheme != "country":
        raise ValueError(f"unknown averaging scheme {scheme!r}")
    return _correlate(study, pairs, excl, f"mean PM2.5 {lo}-{hi}", "mean death rate 2018-2021", params)


# --------------------------------------------------------------------------
# clustering


@dataclass(frozen=True)
class ClusterStudy:
    model: ClusterModel
    elbow: ElbowCurve
    values: dict[str, float]
    loc: float
    scale: float
    exclusions: tuple[Exclusion, ...]
    parameters: dict


def cluster_study(ds: Dataset, k: int = 3, k_max: int = 8, seed: int = 0, year: int = 2023) -> ClusterStudy:
    """K-means on standardized PM2.5 of ``year``.

    Under exclude, countries without a value are left out; a zero-fill
    dataset clusters its filled zeros as well.
    """
    values, excl = {}, []
    for rec in ds:
        v = rec.pm25.get(year)
        if v is None:
            excl.append(Exclusion(rec.country, f"no PM2.5 value for {year}"))
        else:
            values[rec.country] = v
    if len(values) < max(k, 2):
        raise EmptyStudyError(f"clustering needs at least {max(k, 2)} countries with {year} values, "
                              f"found {len(values)}")
    raw = np.array(list(values.values()))
    z = standardize(raw)
    loc, scale = float(raw.mean()), float(np.sqrt(np.mean((raw - raw.mean()) ** 2)))
    points = list(zip(values, z.tolist()))
    k_max = min(k_max, len(points))
    elbow = elbow_curve(points, k_max, seed, loc, scale)
    model = elbow.models[k] if k in elbow.models else elbow_curve(points, k, seed, loc, scale).models[k]
    if k == 3:
        model = label_clusters(model)
    params = {"k": k, "k_max": k_max, "seed": seed, "year": year, "fill_policy": ds.fill_policy.value}
    return ClusterStudy(model, elbow, values, loc, scale, tuple(excl), params)


# --------------------------------------------------------------------------
# forecasting


@dataclass(frozen=True)
class ForecastRow:
    country: str
    region: Region
    order: str
    train: tuple[float, ...]
    predicted_raw: float
    predicted: float
    actual: float | None


@dataclass(frozen=True)
class ForecastStudy:
    rows: tuple[ForecastRow, ...]
    metrics: MetricsBundle | None
    exclusions: tuple[Exclusion, ...]
    parameters: dict
    notes: tuple[str, ...] = ()


def _fit_with_fallback(series, order: arima.ArimaOrder | None):
    if order is None:
        order = arima.select_order(series)
    chain = [order] + [o for o in (arima.ArimaOrder(0, 1, 0, True), arima.ArimaOrder(0, 1, 0)) if o != order]
    for candidate in chain:
        try:
            return arima.fit(series, candidate)
        except (DegenerateFitError, InsufficientDataError):
            continue
    raise InsufficientDataError("no ARIMA order could be fitted")


def forecast_study(ds: Dataset, train_end: int = 2022, test_year: int = 2023,
                   order: arima.ArimaOrder | None = None) -> ForecastStudy:
    """Per-country ARIMA trained on 2018..train_end, forecasting ``test_year``.

    A test year past the observed range (2024) yields forecast-only rows and
    ``metrics=None``. Metrics are pooled over all evaluated countries and
    use the reported (floored at 0) predictions.
    """
    start = OBSERVED_YEARS.start
    if not start <= train_end < test_year:
        raise ValueError(f"need {start} <= train_end < test_year, got {train_end}, {test_year}")
    evaluate = test_year in OBSERVED_YEARS
    h = test_year - train_end
    rows, excl = [], []
    for rec in sorted(ds, key=lambda r: r.country):
        window = rec.pm25.window(start, train_end)
        missing = [start + i for i, v in enumerate(window) if v is None]
        if missing:
            excl.append(Exclusion(rec.country, f"missing PM2.5 in training window: {missing}"))
            continue
        if len(window) < 4:
            excl.append(Exclusion(rec.country, f"training window has {len(window)} values, need >= 4"))
            continue
        # a zero-filled actual would score the forecast against a made-up value
        actual = rec.observed(test_year) if evaluate else None
        if evaluate and actual is None:
            excl.append(Exclusion(rec.country, f"no actual PM2.5 for {test_year}"))
            continue
        model = _fit_with_fallback(window, order)
        raw = float(arima.forecast(model, h)[-1])
        rows.append(ForecastRow(rec.country, rec.region, model.order.label(), tuple(window),
                                raw, max(0.0, raw), actual))
    if not rows:
        raise EmptyStudyError(f"no country has a complete {start}-{train_end} training window"
                              + (f" and a {test_year} actual" if evaluate else ""))
    notes = []
    metrics = None
    if evaluate:
        metrics = evaluate_forecasts([r.actual for r in rows], [r.predicted for r in rows], strict=False)
        if metrics.r_squared is None:
            notes.append("R^2 undefined: fewer than 2 evaluated countries or constant actuals")
    else:
        notes.append(f"no actual values for {test_year}; forecasts are not evaluated")
    params = {"train_start": start, "train_end": train_end, "test_year": test_year,
              "order": order.label() if order else "auto (AICc)", "fill_policy": ds.fill_policy.value}
    # rows are already in country-name order
    return ForecastStudy(tuple(rows), metrics, tuple(excl), params, tuple(notes))


def compare_to_reference(metrics: MetricsBundle) -> list[dict]:
    """Side-by-side rows of our metrics and the published ones."""
    out = []
    for name, ref in REFERENCE_METRICS.items():
        ours = getattr(metrics, name)
        dev = None if ours is None else 100.0 * (ours - ref) / ref
        out.append({"metric": name, "value": ours, "reference": ref, "pct_deviation": dev})
    return out


# --------------------------------------------------------------------------
# reports


@dataclass
class StudyReport:
    study: str
    source: str
    dataset_sha256: str
    parameters: dict
    tables: dict[str, list[dict]]
    exclusions: list[dict]
    notes: list[str] = field(default_factory=list)
    summary: str = ""

    def to_dict(self) -> dict:
        return {
            "study": self.study,
            "source": self.source,
            "dataset_sha256": self.dataset_sha256,
            "parameters": self.parameters,
            "summary": self.summary,
            "notes": self.notes,
            "exclusions": self.exclusions,
            "tables": self.tables,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def table_csv(self, name: str) -> str:
        rows = self.tables[name]
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        return buf.getvalue()

    def write_tables(self, out_dir: Path) -> list[Path]:
        paths = []
        for name in sorted(self.tables):
            path = Path(out_dir) / f"{name}.csv"
            path.write_text(self.table_csv(name), encoding="utf-8")
            paths.append(path)
        return paths


def _excl(items) -> list[dict]:
    return [{"country": e.country, "reason": e.reason} for e in sorted(items, key=lambda e: e.country)]


def _report(study, ds, params, tables, exclusions, notes=(), summary="") -> StudyReport:
    return StudyReport(study, ds.source, ds.digest(), dict(params), tables, _excl(exclusions),
                       list(notes), summary)


def trends_report(ds: Dataset) -> StudyReport:
    t = regional_trends(ds)
    countries = [{"country": c, "region": ds[c].region.value, "year": y, "pm25": v}
                 for c, vals in t.per_country.items() for y, v in vals.items()]
    top = max(Region, key=lambda r: t.mean(r, 2023) if t.mean(r, 2023) is not None else float("-inf"))
    return _report("trends", ds, {"fill_policy": ds.fill_policy.value},
                   {"trends_regional": t.rows(), "trends_countries": countries}, t.exclusions,
                   summary=f"{len(t.per_country)} countries; highest 2023 regional mean: {top.value}")


def deaths_report(ds: Dataset) -> StudyReport:
    s = death_rate_summary(ds)
    south = [{"country": c, "year": y, "rate": v} for c, vals in s.south_asia.items() for y, v in vals.items()]
    return _report("deaths", ds, {"fill_policy": ds.fill_policy.value},
                   {"deaths_regional": s.regional.rows(), "deaths_south_asia": south}, s.exclusions,
                   summary=f"{len(s.regional.per_country)} countries with death rates")


def correlation_report(ds: Dataset, study: str = "density", scheme: str = "country") -> StudyReport:
    if study == "density":
        c = corr_density_pm25(ds)
    elif study == "deaths":
        c = corr_pm25_deaths(ds, (2018, 2023), scheme)
    elif study == "deaths-2021":
        c = corr_pm25_deaths(ds, (2018, 2021), scheme)
    else:
        raise ValueError(f"unknown correlation study {study!r}")
    ref = REFERENCE_CORRELATIONS[study]
    tag = "corr_" + study.replace("-", "_")
    pairs = [{"country": p[0], "region": p[1].value, "x": p[2], "y": p[3]} for p in c.pairs]
    regions = [{"region": r.value, "r": v} for r, v in c.per_region.items()]
    overall = [{"r": c.r, "n": c.n, "reference": ref, "difference": c.r - ref}]
    notes = [EXCLUDE_NOTE]
    if ds.fill_policy is FillPolicy.ZERO_FILL:
        notes.append("Input was zero-filled; filled values were removed before correlating.")
    return _report(f"correlate-{study}", ds, {**c.parameters, "x": c.x_label, "y": c.y_label},
                   {f"{tag}_overall": overall, f"{tag}_pairs": pairs, f"{tag}_regions": regions}, c.exclusions, notes,
                   summary=f"r = {c.r:.4f} over {c.n} points (reference {ref:+.2f})")


def cluster_report(ds: Dataset, k: int = 3, k_max: int = 8, seed: int = 0) -> tuple[StudyReport, ClusterStudy]:
    cs = cluster_study(ds, k, k_max, seed)
    m = cs.model
    members = [{"country": c, "region": ds[c].region.value, "pm25": v, "cluster": m.assignments[c],
                "label": m.label_of(c) or ""} for c, v in sorted(cs.values.items())]
    centers = []
    for j in range(m.k):
        row = {"cluster": j, "center_standardized": m.centers[j], "center": m.raw_centers[j],
               "label": (m.labels or {}).get(j, ""), "size": sum(1 for a in m.assignments.values() if a == j)}
        row["reference"] = REFERENCE_CENTERS.get(row["label"])
        centers.append(row)
    elbow = [{"k": kk, "wcss": w} for kk, w in cs.elbow.wcss.items()]
    summary = f"k={m.k}, WCSS={m.wcss:.4f}, elbow knee at k={cs.elbow.knee}"
    report = _report("cluster", ds, {**cs.parameters, "knee": cs.elbow.knee, "standardize_loc": cs.loc,
                                     "standardize_scale": cs.scale},
                     {"clusters": members, "cluster_centers": centers, "elbow": elbow}, cs.exclusions,
                     summary=summary)
    return report, cs


def forecast_report(ds: Dataset, train_end: int = 2022, test_year: int = 2023,
                    order: arima.ArimaOrder | None = None) -> tuple[StudyReport, ForecastStudy]:
    fs = forecast_study(ds, train_end, test_year, order)
    rows = [{"country": r.country, "region": r.region.value, "order": r.order,
             "predicted": r.predicted, "predicted_raw": r.predicted_raw, "actual": r.actual}
            for r in fs.rows]
    tables = {f"forecasts_{test_year}": rows}
    notes = list(fs.notes)
    if fs.metrics is not None:
        tables[f"metrics_{test_year}"] = [fs.metrics.as_dict()]
        tables[f"reference_{test_year}"] = compare_to_reference(fs.metrics)
        summary = "  ".join(f"{k.upper()}={v:.4f}" if v is not None else f"{k.upper()}=n/a"
                            for k, v in fs.metrics.as_dict().items() if k != "n")
        summary = f"{len(fs.rows)} countries; {summary}"
    else:
        summary = f"{len(fs.rows)} countries forecast for {test_year}; metrics not available"
    return _report(f"forecast-{test_year}", ds, fs.parameters, tables, fs.exclusions, notes, summary), fs
