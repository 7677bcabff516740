import io
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pm25kit.data_model import (
    CSV_COLUMNS,
    DEATH_YEARS,
    OBSERVED_YEARS,
    CountryRecord,
    Dataset,
    FillPolicy,
    Region,
    YearSeries,
    embedded_paper_dataset,
    load_dataset,
    parse_number,
)
from pm25kit.errors import DuplicateCountryError, SchemaError, ValidationError

HEADER = ",".join(CSV_COLUMNS)


def csv_bytes(*rows: str) -> bytes:
    return ("\n".join([HEADER, *rows]) + "\n").encode()


BANGLADESH = 'South Asia,Bangladesh,79.9,83.3,77.1,76.9,65.8,97.1,"171,186,372","147,570",150,149,140,144'


@pytest.mark.parametrize("text,expected", [
    ("1,234,567", 1234567.0),
    (" 97.1 ", 97.1),
    ("0", 0.0),
    ("-3.5", -3.5),
])
def test_parse_number(text, expected):
    assert parse_number(text) == expected


@pytest.mark.parametrize("text", ["", "   ", "n/a", "--", None, "nan", "inf"])
def test_parse_number_absent(text):
    assert parse_number(text) is None


def test_load_row():
    ds = load_dataset(csv_bytes(BANGLADESH))
    rec = ds["Bangladesh"]
    assert rec.region is Region.SOUTH_ASIA
    assert rec.pm25[2018] == 79.9
    assert rec.pm25[2023] == 97.1
    assert rec.population == 171186372
    assert rec.area == 147570
    assert rec.density == pytest.approx(171186372 / 147570, rel=1e-12)
    assert dict(rec.deaths) == {2018: 150, 2019: 149, 2020: 140, 2021: 144}


def test_zero_fill_and_exclude():
    row = "East Asia,Japan,9.1,,,,,,,,,,,"
    excl = load_dataset(csv_bytes(row), FillPolicy.EXCLUDE)["Japan"]
    zero = load_dataset(csv_bytes(row), FillPolicy.ZERO_FILL)["Japan"]
    assert dict(excl.pm25) == {2018: 9.1}
    assert zero.pm25[2023] == 0.0
    assert len([y for y in OBSERVED_YEARS if y in zero.pm25]) == 6
    assert zero.filled_years == frozenset(range(2019, 2024))
    assert zero.observed(2023) is None
    assert excl.density is None


def test_missing_column_named():
    header = HEADER.replace("Country,", "")
    with pytest.raises(SchemaError, match="'Country'"):
        load_dataset((header + "\n").encode())


def test_duplicate_country():
    with pytest.raises(DuplicateCountryError):
        load_dataset(csv_bytes(BANGLADESH, BANGLADESH))


def test_zero_area_rejected():
    with pytest.raises(ValidationError, match="line 2"):
        load_dataset(csv_bytes("South Asia,X,1,1,1,1,1,1,100,0,,,,"))


def test_negative_pm25_rejected():
    with pytest.raises(ValidationError):
        load_dataset(csv_bytes("South Asia,X,-1,1,1,1,1,1,,,,,,"))


def test_non_asian_rows_dropped(caplog):
    data = csv_bytes(BANGLADESH, "Europe,Norway,6,6,6,6,6,6,,,,,,", " south asia ,Nepal,42.4,,,,,54.1,,,,,,")
    with caplog.at_level(logging.WARNING):
        ds = load_dataset(data)
    assert ds.countries == ["Bangladesh", "Nepal"]
    assert "Europe" in caplog.text


def test_region_tokens():
    assert Region.parse("SouthEast Asia") is Region.SOUTHEAST_ASIA
    assert Region.parse("west_asia") is Region.WEST_ASIA
    assert Region.parse("Oceania") is None


def test_stream_and_path_sources(tmp_path):
    data = csv_bytes(BANGLADESH)
    path = tmp_path / "d.csv"
    path.write_bytes(data)
    assert load_dataset(io.BytesIO(data)) == load_dataset(path) == load_dataset(data)
    assert load_dataset(path).source == str(path)


def test_year_series_bounds():
    with pytest.raises(ValidationError):
        YearSeries({2017: 1.0})
    with pytest.raises(ValidationError):
        YearSeries({2019: float("nan")})
    assert YearSeries({2024: 3.0})[2024] == 3.0
    with pytest.raises(ValidationError):
        YearSeries({2022: 1.0}, years=DEATH_YEARS)


def test_loader_never_populates_2024():
    ds = load_dataset(csv_bytes(BANGLADESH), FillPolicy.ZERO_FILL)
    assert 2024 not in ds["Bangladesh"].pm25


def test_zero_fill_dataset_invariant():
    rec = CountryRecord("A", Region.EAST_ASIA, YearSeries({2018: 1.0}))
    with pytest.raises(ValidationError):
        Dataset((rec,), FillPolicy.ZERO_FILL)


def test_embedded_lookups(embedded):
    assert embedded["China"].pm25[2023] == 42.2
    assert embedded["Mongolia"].pm25[2021] == 62
    assert embedded["Maldives"].pm25.get(2023) is None
    assert dict(embedded["Maldives"].pm25) == {2018: 15.3, 2019: 10.9}
    assert sum(1 for r in embedded if 2023 in r.pm25) == 24
    assert all(len(r.deaths) == 0 and r.population is None for r in embedded)


def test_embedded_zero_fill_round_trip(embedded):
    zero = embedded_paper_dataset(FillPolicy.ZERO_FILL)
    assert zero["Maldives"].pm25[2023] == 0.0
    assert zero.with_policy(FillPolicy.EXCLUDE) == embedded


# --- property tests -------------------------------------------------------

values = st.one_of(st.none(), st.floats(0, 500, allow_nan=False).map(lambda v: round(v, 3)))
regions = st.sampled_from(list(Region))


@st.composite
def records(draw, name):
    pm = {y: draw(values) for y in OBSERVED_YEARS}
    deaths = {y: draw(values) for y in DEATH_YEARS}
    pop = draw(st.one_of(st.none(), st.floats(0, 2e9, allow_nan=False)))
    area = draw(st.one_of(st.none(), st.floats(0.5, 2e7, allow_nan=False)))
    return CountryRecord(name, draw(regions), YearSeries(pm), pop, area, YearSeries(deaths, years=DEATH_YEARS))


@st.composite
def datasets(draw):
    names = draw(st.lists(st.text("abcdefghij ,\"", min_size=1, max_size=8).map(str.strip).filter(bool),
                          min_size=1, max_size=6, unique=True))
    policy = draw(st.sampled_from(list(FillPolicy)))
    return Dataset(tuple(draw(records(n)) for n in names)).with_policy(policy)


@settings(max_examples=75, deadline=None)
@given(datasets())
def test_csv_round_trip(ds):
    again = load_dataset(ds.to_csv().encode(), ds.fill_policy)
    assert again == ds
    assert [r.filled_years for r in again] == [r.filled_years for r in ds]


@settings(max_examples=75, deadline=None)
@given(datasets())
def test_density_invariant_and_fill_counts(ds):
    for rec in ds:
        if rec.population is not None and rec.area is not None:
            assert rec.density * rec.area == pytest.approx(rec.population, rel=1e-6, abs=1e-9)
        else:
            assert rec.density is None
        if ds.fill_policy is FillPolicy.ZERO_FILL:
            assert sum(1 for y in OBSERVED_YEARS if y in rec.pm25) == 6
        else:
            assert not rec.filled_years


@settings(max_examples=30, deadline=None)
@given(datasets())
def test_load_deterministic(ds):
    raw = ds.to_csv().encode()
    assert load_dataset(raw) == load_dataset(raw)
    assert load_dataset(raw).digest() == load_dataset(raw).digest()
