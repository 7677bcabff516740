"""Write a synthetic, complete country-level CSV in the toolkit's input schema.

The numbers are invented (seeded RNG around plausible regional levels); the
file exists to exercise code paths the embedded dataset cannot reach
(density, death rates, full forecasting windows). It is not real data.

    python scripts/make_synthetic_csv.py tests/data/synthetic_full.csv
"""

import argparse
import csv
import sys

import numpy as np

from pm25kit.data_model import CSV_COLUMNS

COUNTRIES = {
    "South Asia": [("Bangladesh", 82, 170e6, 147570), ("India", 58, 1430e6, 3287263),
                   ("Pakistan", 65, 240e6, 881913), ("Nepal", 45, 30e6, 147181),
                   ("Sri Lanka", 22, 22e6, 65610), ("Bhutan", 20, 0.8e6, 38394)],
    "Central Asia": [("Kazakhstan", 24, 19.6e6, 2724900), ("Uzbekistan", 38, 35e6, 448978),
                     ("Kyrgyzstan", 35, 7e6, 199951), ("Tajikistan", 45, 10e6, 143100)],
    "Southeast Asia": [("Indonesia", 42, 277e6, 1904569), ("Thailand", 24, 70e6, 513120),
                       ("Vietnam", 30, 99e6, 331212), ("Philippines", 14, 117e6, 300000),
                       ("Malaysia", 20, 34e6, 330803), ("Singapore", 14, 5.9e6, 728),
                       ("Myanmar", 30, 54e6, 676578), ("Laos", 25, 7.6e6, 236800),
                       ("Cambodia", 20, 17e6, 181035)],
    "East Asia": [("China", 35, 1410e6, 9596961), ("Japan", 10, 124e6, 377975),
                  ("South Korea", 21, 51.7e6, 100210), ("Taiwan", 17, 23.9e6, 36193),
                  ("Mongolia", 40, 3.4e6, 1564116), ("Macao SAR", 18, 0.7e6, 33),
                  ("Hong Kong SAR", 17, 7.5e6, 1104)],
    "West Asia": [("Turkey", 20, 85e6, 783562), ("Saudi Arabia", 32, 36e6, 2149690),
                  ("Iraq", 50, 45e6, 438317), ("Israel", 18, 9.7e6, 22145),
                  ("Qatar", 40, 2.7e6, 11586), ("Bahrain", 48, 1.5e6, 778),
                  ("Kuwait", 45, 4.3e6, 17818), ("United Arab Emirates", 40, 9.5e6, 83600),
                  ("Armenia", 30, 2.8e6, 29743), ("Azerbaijan", 25, 10.4e6, 86600)],
}


def build_rows(seed: int = 2024) -> list[list[str]]:
    rng = np.random.default_rng(seed)
    rows = []
    for region, countries in COUNTRIES.items():
        for name, level, pop, area in countries:
            trend = rng.normal(0.8, 1.2)
            pm = [max(1.0, level + trend * t + rng.normal(0, 2.5)) for t in range(6)]
            base_death = 20 + 1.4 * level + rng.normal(0, 12)
            deaths = [max(1.0, base_death + rng.normal(0, 3)) for _ in range(4)]
            rows.append([region, name, *(f"{v:.1f}" for v in pm), f"{int(pop):,}", f"{area:,}",
                         *(f"{v:.1f}" for v in deaths)])
    # a few realistic holes: a missing year, a missing population, no deaths
    rows[5][4] = ""
    rows[-1][8] = ""
    rows[16][10:14] = ["", "", "", ""]
    rows.append(["Europe", "Norway", "6.0", "5.9", "5.5", "6.1", "5.8", "5.6", "5,500,000", "385,207",
                 "8", "8", "7", "7"])
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("path", nargs="?", default="-")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)
    fh = sys.stdout if args.path == "-" else open(args.path, "w", newline="", encoding="utf-8")
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(build_rows(args.seed))


if __name__ == "__main__":
    main()
