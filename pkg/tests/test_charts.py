import re

import pytest

from pm25kit.charts import HEIGHT, WIDTH, ChartSpec, render_chart, year_series
from pm25kit.errors import PM25Error
from pm25kit.figures import correlation_heatmap


def test_single_polyline_two_points():
    spec = ChartSpec("line", "Bangladesh", "Year", "PM2.5", (("Bangladesh", ((2018, 79.9), (2023, 97.1))),))
    svg = render_chart(spec)
    lines = re.findall(r'<polyline[^>]*points="([^"]*)"', svg)
    assert len(lines) == 1
    assert len(lines[0].split()) == 2
    assert f'width="{WIDTH}" height="{HEIGHT}"' in svg


def test_deterministic():
    spec = ChartSpec("bar", "t", "x", "y", (("a", ((0, 1.0), (1, 2.5))), ("b", ((0, 3.0), (1, None)))),
                     categories=("2018", "2019"))
    assert render_chart(spec) == render_chart(spec)


def test_gaps_break_lines_and_never_plot_zero():
    pts = year_series({2018: 10.0, 2019: 12.0, 2021: 14.0, 2022: 15.0}, range(2018, 2024))
    svg = render_chart(ChartSpec("line", "g", "Year", "PM", (("c", pts),)))
    assert len(re.findall(r"<polyline", svg)) == 2
    assert len(re.findall(r"<circle", svg)) == 4


def test_isolated_points_have_no_line():
    pts = year_series({2018: 79.9, 2023: 97.1}, range(2018, 2024))
    svg = render_chart(ChartSpec("line", "g", "Year", "PM", (("c", pts),)))
    assert "<polyline" not in svg
    assert len(re.findall(r"<circle", svg)) == 2


def test_heatmap_cells():
    svg = render_chart(correlation_heatmap("m", ["density", "pm25"], [[1, -0.20], [-0.20, 1]]))
    fills = re.findall(r'<rect class="cell"[^>]*fill="(#[0-9a-f]{6})"', svg)
    assert len(fills) == 4
    assert fills[0] == fills[3]
    assert fills[1] == fills[2] != fills[0]


def test_elbow_marker():
    spec = ChartSpec("elbow", "e", "k", "WCSS", (("WCSS", tuple((k, 10.0 / k) for k in range(1, 6))),), marker_x=3)
    assert 'class="marker"' in render_chart(spec)


def test_validation():
    with pytest.raises(PM25Error):
        render_chart(ChartSpec("line", "t", "x", "y", ()))
    with pytest.raises(PM25Error):
        ChartSpec("line", "t", "x", "y", (("a", ((2018, float("nan")),)),))
    with pytest.raises(PM25Error):
        ChartSpec("pie", "t", "x", "y", (("a", ((0, 1),)),))


def test_escapes_text():
    svg = render_chart(ChartSpec("scatter", "A & B <c>", "x", "y", (("s", ((1, 1), (2, 2))),)))
    assert "A &amp; B &lt;c&gt;" in svg
