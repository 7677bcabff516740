"""Command-line driver.

Exit codes: 0 success, 1 usage or validation error, 2 a study had no data
to work with (for example density correlation on the embedded dataset).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, analysis, figures
from .arima import ArimaOrder
from .charts import render_chart
from .data_model import Dataset, FillPolicy, embedded_paper_dataset, load_dataset
from .errors import DegenerateInputError, PM25Error

EXIT_OK, EXIT_INVALID, EXIT_EMPTY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


class _Run:
    """Collects reports, charts and the manifest for one invocation."""

    def __init__(self, args: argparse.Namespace, ds: Dataset, out: Path):
        self.args, self.ds, self.out = args, ds, out
        self.reports: list[analysis.StudyReport] = []
        self.skipped: list[dict] = []
        self.charts: dict = {}

    def add(self, report: analysis.StudyReport) -> None:
        self.reports.append(report)
        print(f"{report.study}: {report.summary}")

    def skip(self, study: str, exc: Exception) -> None:
        self.skipped.append({"study": study, "reason": str(exc)})
        print(f"{study}: skipped ({exc})")

    def write(self) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        written = []
        fmt = self.args.format
        if fmt in ("json", "both"):
            doc = {"toolkit_version": __version__, "source": self.ds.source,
                   "dataset_sha256": self.ds.digest(),
                   "studies": [r.to_dict() for r in self.reports], "skipped": self.skipped}
            (self.out / "report.json").write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
            written.append("report.json")
        if fmt in ("csv", "both"):
            for r in self.reports:
                written += [p.name for p in r.write_tables(self.out)]
        for name in sorted(self.charts):
            (self.out / f"{name}.svg").write_text(render_chart(self.charts[name]), encoding="utf-8")
            written.append(f"{name}.svg")
        manifest = {
            "command": self.args.command,
            "parameters": _parameters(self.args),
            "dataset_sha256": self.ds.digest(),
            "source": self.ds.source,
            "toolkit_version": __version__,
            "outputs": sorted(written),
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                                                encoding="utf-8")


def _parameters(args: argparse.Namespace) -> dict:
    skip = {"command", "out", "func", "input"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _trends(run: _Run) -> None:
    run.add(analysis.trends_report(run.ds))
    run.charts.update(figures.trend_figures(run.ds, analysis.regional_trends(run.ds)))


def _deaths(run: _Run) -> None:
    run.add(analysis.deaths_report(run.ds))
    run.charts.update(figures.death_figures(analysis.death_rate_summary(run.ds)))


def _correlate(run: _Run, studies: list[str], strict: bool) -> None:
    results = {}
    for study in studies:
        try:
            run.add(analysis.correlation_report(run.ds, study, run.args.scheme))
        except DegenerateInputError as exc:
            if strict:
                raise
            run.skip(f"correlate-{study}", exc)
            continue
        if study == "density":
            results[study] = analysis.corr_density_pm25(run.ds)
        else:
            window = (2018, 2023) if study == "deaths" else (2018, 2021)
            results[study] = analysis.corr_pm25_deaths(run.ds, window, run.args.scheme)
    if "density" in results:
        run.charts["corr_density"] = figures.density_figure(results["density"])
    if "deaths" in results:
        run.charts["corr_deaths"] = figures.deaths_figure(results["deaths"], results.get("deaths-2021"))
    if not results:
        raise analysis.EmptyStudyError("no correlation study had enough data")


def _cluster(run: _Run) -> None:
    report, cs = analysis.cluster_report(run.ds, run.args.k, run.args.k_max, run.args.seed)
    run.add(report)
    run.charts.update(figures.cluster_figures(cs))


def _forecast(run: _Run, train_end: int, test_year: int, order: ArimaOrder | None, compare: bool) -> None:
    report, fs = analysis.forecast_report(run.ds, train_end, test_year, order)
    run.add(report)
    run.charts[f"forecast_{test_year}"] = figures.forecast_figure(fs)
    if compare and fs.metrics is not None:
        for row in analysis.compare_to_reference(fs.metrics):
            value = "n/a" if row["value"] is None else f"{row['value']:.4f}"
            dev = "n/a" if row["pct_deviation"] is None else f"{row['pct_deviation']:+.1f}%"
            print(f"  {row['metric']:<10} {value:>10}  reference {row['reference']:>6.2f}  deviation {dev}")


def _order(args) -> ArimaOrder | None:
    return ArimaOrder.parse(args.order) if args.order else None


def cmd_trends(run):
    _trends(run)


def cmd_deaths(run):
    _deaths(run)


def cmd_correlate(run):
    studies = ["density", "deaths", "deaths-2021"] if run.args.study == "all" else [run.args.study]
    _correlate(run, studies, strict=run.args.study != "all")


def cmd_cluster(run):
    _cluster(run)


def cmd_forecast(run):
    _forecast(run, run.args.train_end, run.args.test_year, _order(run.args), compare=False)


def cmd_evaluate(run):
    _forecast(run, 2022, 2023, _order(run.args), compare=True)


def cmd_report(run):
    steps = [
        ("trends", lambda: _trends(run)),
        ("deaths", lambda: _deaths(run)),
        ("correlate", lambda: _correlate(run, ["density", "deaths", "deaths-2021"], strict=False)),
        ("cluster", lambda: _cluster(run)),
        ("forecast-2023", lambda: _forecast(run, 2022, 2023, _order(run.args), compare=True)),
        ("forecast-2024", lambda: _forecast(run, 2023, 2024, _order(run.args), compare=False)),
    ]
    for name, step in steps:
        try:
            step()
        except DegenerateInputError as exc:
            if name != "correlate":
                run.skip(name, exc)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="country-level CSV")
    src.add_argument("--embedded", action="store_true", help="use the built-in desk-scale dataset")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    common.add_argument("--fill-policy", choices=[p.value for p in FillPolicy], default="exclude")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["csv", "json", "both"], default="both")

    parser = _Parser(prog="pm25kit", description="PM2.5 analytics for Asian countries")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("trends", parents=[common], help="regional PM2.5 averages").set_defaults(func=cmd_trends)
    sub.add_parser("deaths", parents=[common], help="death-rate summaries").set_defaults(func=cmd_deaths)

    p = sub.add_parser("correlate", parents=[common], help="correlation studies")
    p.add_argument("--study", choices=["density", "deaths", "deaths-2021", "all"], default="all")
    p.add_argument("--scheme", choices=["country", "region"], default="country")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("cluster", parents=[common], help="K-means on 2023 PM2.5")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--k-max", type=int, default=8)
    p.set_defaults(func=cmd_cluster)

    order_help = "manual ARIMA order p,d,q[,drift] (default: AICc selection)"
    p = sub.add_parser("forecast", parents=[common], help="per-country ARIMA forecasts")
    p.add_argument("--train-end", type=int, default=2022)
    p.add_argument("--test-year", type=int, default=2023)
    p.add_argument("--order", help=order_help)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("evaluate", parents=[common], help="train 2018-2022, score 2023 against reference")
    p.add_argument("--order", help=order_help)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", parents=[common], help="run every study")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--scheme", choices=["country", "region"], default="country")
    p.add_argument("--order", help=order_help)
    p.set_defaults(func=cmd_report)
    return parser


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        policy = FillPolicy(args.fill_policy)
        ds = embedded_paper_dataset(policy) if args.embedded else load_dataset(args.input, policy)
        run = _Run(args, ds, args.out)
        args.func(run)
    except DegenerateInputError as exc:
        print(f"{args.command}: not enough data: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (PM25Error, OSError) as exc:
        print(f"{args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    run.write()
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
