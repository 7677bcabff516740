"""Chart specs for each study's figures."""

from __future__ import annotations

from .analysis import ClusterStudy, CorrelationResult, DeathRateSummary, ForecastStudy, RegionalTrendTable
from .charts import ChartSpec, year_series
from .clustering import POLLUTION_LABELS
from .data_model import Dataset, Region
from .errors import DegenerateInputError
from .stats_metrics import pearson

PM_AXIS = "PM2.5 (ug/m3)"


def _slug(region: Region) -> str:
    return region.value.lower().replace(" ", "_")


def trend_figures(ds: Dataset, table: RegionalTrendTable) -> dict[str, ChartSpec]:
    figs = {}
    for region in Region:
        series = tuple((c, year_series(v, table.years)) for c, v in table.per_country.items()
                       if ds[c].region is region)
        if series:
            figs[f"trends_{_slug(region)}"] = ChartSpec(
                "line", f"PM2.5 trends in {region.value}", "Year", PM_AXIS, series)
    overall = tuple((r.value, year_series({y: table.mean(r, y) for y in table.years if table.mean(r, y) is not None},
                                          table.years))
                    for r in Region if any(table.mean(r, y) is not None for y in table.years))
    if overall:
        figs["trends_overall"] = ChartSpec("line", "Regional average PM2.5", "Year", PM_AXIS, overall)
    return figs


def death_figures(summary: DeathRateSummary) -> dict[str, ChartSpec]:
    t = summary.regional
    cats = tuple(str(y) for y in t.years)
    bars = tuple((r.value, tuple((float(i), t.mean(r, y)) for i, y in enumerate(t.years)))
                 for r in Region if any(t.mean(r, y) is not None for y in t.years))
    figs = {"deaths_regional": ChartSpec("bar", "Average death rate by region", "Year", "Death rate",
                                         bars, categories=cats)}
    if summary.south_asia:
        figs["deaths_south_asia"] = ChartSpec(
            "line", "Death rates in South Asia", "Year", "Death rate",
            tuple((c, year_series(v, t.years)) for c, v in summary.south_asia.items()))
    return figs


def correlation_heatmap(title: str, labels: list[str], matrix: list[list[float]]) -> ChartSpec:
    rows = tuple((labels[i], tuple((float(j), v) for j, v in enumerate(row))) for i, row in enumerate(matrix))
    return ChartSpec("heatmap", title, "", "", rows, categories=tuple(labels))


def density_figure(c: CorrelationResult) -> ChartSpec:
    return correlation_heatmap("Correlation: PM2.5 and population density",
                               ["Population density", "PM2.5 2023"], [[1.0, c.r], [c.r, 1.0]])


def deaths_figure(c23: CorrelationResult, c21: CorrelationResult | None) -> ChartSpec:
    if c21 is None:
        return correlation_heatmap("Correlation: mean PM2.5 and mean death rate",
                                   ["PM2.5 2018-2023", "Death rate"], [[1.0, c23.r], [c23.r, 1.0]])
    # cross term between the two PM2.5 windows over their common countries
    a = {p[0]: p[2] for p in c23.pairs}
    b = {p[0]: p[2] for p in c21.pairs}
    common = sorted(set(a) & set(b))
    try:
        cross = pearson([a[k] for k in common], [b[k] for k in common])
    except DegenerateInputError:
        cross = None
    labels = ["PM2.5 2018-2023", "PM2.5 2018-2021", "Death rate"]
    matrix = [[1.0, cross, c23.r], [cross, 1.0, c21.r], [c23.r, c21.r, 1.0]]
    return correlation_heatmap("Correlation: mean PM2.5 and mean death rate", labels, matrix)


def cluster_figures(cs: ClusterStudy) -> dict[str, ChartSpec]:
    elbow = ChartSpec("elbow", "Elbow method", "k", "WCSS (standardized)",
                      (("WCSS", tuple((float(k), w) for k, w in cs.elbow.wcss.items())),),
                      marker_x=float(cs.elbow.knee))
    ordered = sorted(cs.values, key=lambda c: (cs.values[c], c))
    m = cs.model
    groups = ([(lab, [j for j, name in m.labels.items() if name == lab]) for lab in POLLUTION_LABELS]
              if m.labels else [(f"Cluster {j}", [j]) for j in range(m.k)])
    series = tuple((f"{lab} pollution" if m.labels else lab,
                    tuple((float(i), cs.values[c] if m.assignments[c] in js else None)
                          for i, c in enumerate(ordered)))
                   for lab, js in groups)
    clusters = ChartSpec("bar", "PM2.5 2023 by cluster", "Country", PM_AXIS, series, categories=tuple(ordered))
    return {"elbow": elbow, "clusters": clusters}


def forecast_figure(fs: ForecastStudy) -> ChartSpec:
    year = fs.parameters["test_year"]
    cats = tuple(r.country for r in fs.rows)
    series = [("Predicted", tuple((float(i), r.predicted) for i, r in enumerate(fs.rows)))]
    if fs.metrics is not None:
        series.insert(0, ("Actual", tuple((float(i), r.actual) for i, r in enumerate(fs.rows))))
    return ChartSpec("bar", f"ARIMA forecasts for {year}", "Country", PM_AXIS, tuple(series), categories=cats)
