"""Domain records and the CSV ingestion/cleaning pipeline.

Raw rows go through: numeric coercion (empty/non-numeric -> missing),
comma stripping for population and area, density derivation, filtering to
the five Asian regions, and optional zero-filling of missing PM2.5 values.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import logging
import math
import os
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import BinaryIO, Union

from .errors import DuplicateCountryError, SchemaError, ValidationError

log = logging.getLogger(__name__)

PM25_YEARS = range(2018, 2025)  # 2024 only ever holds forecasts
OBSERVED_YEARS = range(2018, 2024)
DEATH_YEARS = range(2018, 2022)

CSV_COLUMNS = (
    "Region",
    "Country",
    *(f"PM25_{y}" for y in OBSERVED_YEARS),
    "Population_2023",
    "Area_km2",
    *(f"Death_{y}" for y in DEATH_YEARS),
)


class Region(str, enum.Enum):
    CENTRAL_ASIA = "Central Asia"
    EAST_ASIA = "East Asia"
    SOUTH_ASIA = "South Asia"
    SOUTHEAST_ASIA = "Southeast Asia"
    WEST_ASIA = "West Asia"

    @classmethod
    def parse(cls, token: str) -> Region | None:
        """Match a region token ignoring case, spacing, '-' and '_'.

        Returns None for anything that is not one of the five regions.
        """
        key = "".join(ch for ch in token.strip().lower() if ch not in " -_")
        for region in cls:
            if region.value.replace(" ", "").lower() == key:
                return region
        return None


class FillPolicy(str, enum.Enum):
    ZERO_FILL = "zero"
    EXCLUDE = "exclude"


class YearSeries(Mapping):
    """Immutable year -> value map holding only the present observations.

    ``series.get(year)`` is None for a missing year. Years outside the
    allowed range and negative or non-finite values are rejected.
    """

    __slots__ = ("_values", "_years")

    def __init__(self, values: Mapping[int, float] | Iterable[tuple[int, float]] = (),
                 years: range = PM25_YEARS):
        items = values.items() if isinstance(values, Mapping) else values
        clean: dict[int, float] = {}
        for year, value in items:
            if value is None:
                continue
            year = int(year)
            if year not in years:
                raise ValidationError(f"year {year} outside {years.start}-{years.stop - 1}")
            value = float(value)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"value for {year} must be finite and >= 0, got {value}")
            clean[year] = value
        self._values = dict(sorted(clean.items()))
        self._years = years

    @property
    def allowed_years(self) -> range:
        return self._years

    def __getitem__(self, year: int) -> float:
        return self._values[year]

    def __iter__(self) -> Iterator[int]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, YearSeries):
            return self._values == other._values
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._values.items()))

    def __repr__(self) -> str:
        return f"YearSeries({self._values!r})"

    def window(self, start: int, end: int) -> list[float | None]:
        """Values for ``start..end`` inclusive, None where missing."""
        return [self._values.get(y) for y in range(start, end + 1)]


@dataclass(frozen=True)
class CountryRecord:
    country: str
    region: Region
    pm25: YearSeries = field(default_factory=YearSeries)
    population: float | None = None
    area: float | None = None
    deaths: YearSeries = field(default_factory=lambda: YearSeries(years=DEATH_YEARS))
    # years whose PM2.5 value was manufactured by zero-filling
    filled_years: frozenset[int] = frozenset()
    density: float | None = field(init=False, default=None)

    def __post_init__(self):
        if not self.country or not self.country.strip():
            raise ValidationError("country name must be nonempty")
        if not isinstance(self.region, Region):
            raise ValidationError(f"{self.country}: region must be a Region, got {self.region!r}")
        if not isinstance(self.pm25, YearSeries):
            object.__setattr__(self, "pm25", YearSeries(self.pm25))
        if not isinstance(self.deaths, YearSeries):
            object.__setattr__(self, "deaths", YearSeries(self.deaths, years=DEATH_YEARS))
        if self.deaths.allowed_years != DEATH_YEARS:
            raise ValidationError(f"{self.country}: death rates cover {DEATH_YEARS.start}-{DEATH_YEARS.stop - 1}")
        if self.population is not None:
            if not math.isfinite(self.population) or self.population < 0:
                raise ValidationError(f"{self.country}: population must be finite and >= 0")
        if self.area is not None:
            if not math.isfinite(self.area) or self.area <= 0:
                raise ValidationError(f"{self.country}: area must be > 0, got {self.area}")
        if not self.filled_years <= set(self.pm25):
            raise ValidationError(f"{self.country}: filled years must carry a value")
        if self.population is not None and self.area is not None:
            object.__setattr__(self, "density", self.population / self.area)

    def observed(self, year: int) -> float | None:
        """PM2.5 for ``year`` ignoring any zero-filled value."""
        if year in self.filled_years:
            return None
        return self.pm25.get(year)


@dataclass(frozen=True)
class Dataset:
    records: tuple[CountryRecord, ...]
    fill_policy: FillPolicy = FillPolicy.EXCLUDE
    source: str = field(default="<memory>", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[str] = set()
        for rec in self.records:
            if rec.country in seen:
                raise DuplicateCountryError(f"duplicate country {rec.country!r}")
            seen.add(rec.country)
            if self.fill_policy is FillPolicy.ZERO_FILL:
                missing = [y for y in OBSERVED_YEARS if y not in rec.pm25]
                if missing:
                    raise ValidationError(f"{rec.country}: zero-fill dataset missing years {missing}")
            elif rec.filled_years:
                raise ValidationError(f"{rec.country}: exclude dataset carries zero-filled values")

    def __iter__(self) -> Iterator[CountryRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, country: str) -> CountryRecord:
        for rec in self.records:
            if rec.country == country:
                return rec
        raise KeyError(country)

    @property
    def countries(self) -> list[str]:
        return [r.country for r in self.records]

    def with_policy(self, policy: FillPolicy) -> Dataset:
        """Re-express the dataset under another fill policy.

        Zero-filled values are tracked per record, so going ZeroFill ->
        Exclude recovers the original observations exactly.
        """
        policy = FillPolicy(policy)
        if policy is self.fill_policy:
            return self
        records = []
        for rec in self.records:
            if policy is FillPolicy.ZERO_FILL:
                values = dict(rec.pm25)
                filled = frozenset(y for y in OBSERVED_YEARS if y not in values)
                values.update({y: 0.0 for y in filled})
            else:
                values = {y: v for y, v in rec.pm25.items() if y not in rec.filled_years}
                filled = frozenset()
            records.append(CountryRecord(rec.country, rec.region, YearSeries(values), rec.population,
                                         rec.area, rec.deaths, filled))
        return Dataset(tuple(records), policy, self.source)

    def to_csv(self) -> str:
        """Serialize in the input schema; zero-filled cells are written empty."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in self.records:
            writer.writerow([
                rec.region.value,
                rec.country,
                *(_fmt(rec.observed(y)) for y in OBSERVED_YEARS),
                _fmt(rec.population),
                _fmt(rec.area),
                *(_fmt(rec.deaths.get(y)) for y in DEATH_YEARS),
            ])
        return buf.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(f"{self.fill_policy.value}\n{self.to_csv()}".encode()).hexdigest()


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def parse_number(text: str | None) -> float | None:
    """Parse a raw cell, tolerating thousands separators.

    >>> parse_number("1,234,567")
    1234567.0
    >>> parse_number("n/a") is None
    True
    """
    if text is None:
        return None
    cleaned = text.replace(",", "").strip()
    if not cleaned:
        return None
    try:
        value = float(cleaned)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


Source = Union[bytes, BinaryIO, str, "os.PathLike[str]"]


def load_dataset(source: Source, fill_policy: FillPolicy = FillPolicy.EXCLUDE) -> Dataset:
    """Load and clean a country-level CSV.

    ``source`` is raw bytes, a binary stream, or a filesystem path. Rows
    whose region is not one of the five Asian regions are dropped with a
    warning. Raises SchemaError, DuplicateCountryError or ValidationError.
    """
    fill_policy = FillPolicy(fill_policy)
    if isinstance(source, bytes):
        raw, name = source, f"<bytes sha256:{hashlib.sha256(source).hexdigest()[:12]}>"
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            raw = fh.read()
        name = os.fspath(source)
    else:
        raw = source.read()
        name = getattr(source, "name", "<stream>")

    reader = csv.DictReader(io.StringIO(raw.decode("utf-8-sig")))
    header = [h.strip() for h in (reader.fieldnames or [])]
    for col in CSV_COLUMNS:
        if col not in header:
            raise SchemaError(f"missing column {col!r}")
    reader.fieldnames = header

    records = []
    for lineno, row in enumerate(reader, start=2):
        region = Region.parse(row["Region"] or "")
        if region is None:
            log.warning("line %d: dropping row with non-Asian region %r", lineno, row["Region"])
            continue
        country = (row["Country"] or "").strip()
        try:
            pm25 = YearSeries({y: parse_number(row[f"PM25_{y}"]) for y in OBSERVED_YEARS})
            deaths = YearSeries({y: parse_number(row[f"Death_{y}"]) for y in DEATH_YEARS}, years=DEATH_YEARS)
            rec = CountryRecord(country, region, pm25,
                                parse_number(row["Population_2023"]),
                                parse_number(row["Area_km2"]), deaths)
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        records.append(rec)

    return Dataset(tuple(records), FillPolicy.EXCLUDE, name).with_policy(fill_policy)


# Country/year PM2.5 values quoted in the regional results prose. Only the
# endpoints and peaks named there are known; every other cell is missing.
_PAPER_VALUES: dict[Region, dict[str, dict[int, float]]] = {
    Region.SOUTH_ASIA: {
        "Bangladesh": {2018: 79.9, 2023: 97.1},
        "India": {2018: 54.4, 2023: 72.5},
        "Pakistan": {2020: 66.8, 2021: 59.0},
        "Nepal": {2018: 42.4, 2023: 54.1},
        "Sri Lanka": {2018: 19.3, 2023: 32.0},
        "Maldives": {2018: 15.3, 2019: 10.9},
    },
    Region.CENTRAL_ASIA: {
        "Kazakhstan": {2021: 21.9, 2023: 29.8},
        "Uzbekistan": {2020: 42.8, 2023: 34.3},
        "Kyrgyzstan": {2020: 50.8},
        "Tajikistan": {2020: 59.4},
    },
    Region.SOUTHEAST_ASIA: {
        "Indonesia": {2021: 51.7, 2023: 42.0},
        "Thailand": {2018: 23.3, 2023: 26.4},
        "Vietnam": {2021: 34.1, 2023: 32.9},
        "Philippines": {2018: 13.5, 2023: 14.6},
        "Malaysia": {2018: 22.5, 2021: 19.4},
        "Singapore": {2018: 13.4, 2023: 14.8},
        "Myanmar": {},
        "Laos": {},
        "Cambodia": {2018: 22.8, 2019: 8.3, 2021: 21.1, 2023: 20.1},
    },
    Region.EAST_ASIA: {
        "China": {2018: 32.5, 2023: 42.2},
        "Japan": {2018: 9.1, 2023: 12.0},
        "South Korea": {2018: 19.2, 2023: 24.0},
        "Taiwan": {2018: 20.2, 2020: 15.0, 2023: 18.5},
        "Mongolia": {2018: 22.5, 2021: 62.0, 2023: 58.5},
        "Macao SAR": {2018: 16.2, 2023: 21.2},
        "Hong Kong SAR": {2018: 14.5, 2023: 20.2},
    },
    Region.WEST_ASIA: {
        "Turkey": {2021: 18.7, 2023: 21.9},
        "Saudi Arabia": {2019: 41.5, 2021: 22.1},
        "Iraq": {2019: 80.1, 2021: 39.6},
        "Israel": {2021: 16.9, 2023: 18.6},
        "Qatar": {2018: 37.6, 2021: 44.3},
        "Bahrain": {2018: 39.2, 2023: 59.8},
        "Kuwait": {2019: 55.8, 2021: 34.0, 2023: 56.0},
        "United Arab Emirates": {2018: 43.0, 2021: 29.2, 2023: 49.9},
        "Armenia": {2018: 26.4, 2020: 33.9},
        "Azerbaijan": {},
        "Georgia": {},
    },
}


def embedded_paper_dataset(fill_policy: FillPolicy = FillPolicy.EXCLUDE) -> Dataset:
    """Desk-scale dataset of the PM2.5 values quoted for each country.

    Countries mentioned without any number are kept with an empty series so
    studies can list them as exclusions. No population, area or death data.
    """
    records = tuple(
        CountryRecord(country, region, YearSeries(values))
        for region, countries in _PAPER_VALUES.items()
        for country, values in countries.items()
    )
    return Dataset(records, FillPolicy.EXCLUDE, "<embedded>").with_policy(fill_policy)
