"""Run every study and print each published figure beside ours.

    python scripts/replicate.py                   # embedded dataset
    python scripts/replicate.py --input full.csv  # your own country-level CSV

Studies without enough data print the reason instead of a number.
"""

import argparse

from pm25kit import analysis
from pm25kit.data_model import FillPolicy, Region, embedded_paper_dataset, load_dataset
from pm25kit.errors import DegenerateInputError


def _row(name, ours, ref):
    if ours is None:
        print(f"{name:<28} {'n/a':>10}  reference {ref:>7.2f}")
        return
    print(f"{name:<28} {ours:>10.4f}  reference {ref:>7.2f}  diff {ours - ref:+.4f}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--input", help="country-level CSV (default: embedded dataset)")
    ap.add_argument("--fill-policy", choices=[p.value for p in FillPolicy], default="exclude")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    policy = FillPolicy(args.fill_policy)
    ds = load_dataset(args.input, policy) if args.input else embedded_paper_dataset(policy)

    trends = analysis.regional_trends(ds)
    means = {r: trends.mean(r, 2023) for r in Region}
    ranked = sorted((v, r.value) for r, v in means.items() if v is not None)
    print(f"highest 2023 regional mean: {ranked[-1][1]} ({ranked[-1][0]:.4f})")

    try:
        cs = analysis.cluster_study(ds, seed=args.seed)
        by_label = {lab: cs.model.raw_centers[j] for j, lab in cs.model.labels.items()}
        for label, ref in analysis.REFERENCE_CENTERS.items():
            _row(f"cluster centre {label}", by_label[label], ref)
        print(f"elbow knee: k={cs.elbow.knee}")
    except DegenerateInputError as exc:
        print(f"clustering: {exc}")

    studies = {"density": lambda: analysis.corr_density_pm25(ds),
               "deaths": lambda: analysis.corr_pm25_deaths(ds, (2018, 2023)),
               "deaths-2021": lambda: analysis.corr_pm25_deaths(ds, (2018, 2021))}
    for name, run in studies.items():
        try:
            _row(f"correlation {name}", run().r, analysis.REFERENCE_CORRELATIONS[name])
        except DegenerateInputError as exc:
            print(f"correlation {name}: {exc}")

    try:
        fs = analysis.forecast_study(ds, 2022, 2023)
        for row in analysis.compare_to_reference(fs.metrics):
            _row(f"forecast {row['metric']}", row["value"], row["reference"])
    except DegenerateInputError as exc:
        print(f"forecast 2023: {exc}")


if __name__ == "__main__":
    main()
