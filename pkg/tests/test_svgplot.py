import re
import xml.etree.ElementTree as ET

import pytest

from cp_dynamics.svgplot import EmptySeriesError, Series, emit_plot, masked_intervals

NS = "{http://www.w3.org/2000/svg}"


def elements(svg, tag, cls):
    root = ET.fromstring(svg)
    return [e for e in root.iter(NS + tag) if e.get("class") == cls]


def test_zero_series_lies_on_zero_line():
    svg = emit_plot([Series([0, 1, 2], [0, 0, 0])])
    (poly,) = elements(svg, "polyline", "series")
    (zero,) = elements(svg, "line", "zero")
    ys = {p.split(",")[1] for p in poly.get("points").split()}
    assert ys == {zero.get("y1")}


def test_one_masked_run_gives_one_rect():
    svg = emit_plot([Series([0, 1, 2, 3, 4], [1, 2, 0, 2, 1], [False, False, True, False, False])])
    assert len(elements(svg, "rect", "masked")) == 1
    assert len(elements(svg, "polyline", "series")) == 2


def test_explicit_windows_override_mask():
    svg = emit_plot([Series([0, 1, 2], [1, 2, 3])], windows=[(0.5, 0.6), (1.2, 1.3)])
    assert len(elements(svg, "rect", "masked")) == 2


def test_two_series_have_legend():
    svg = emit_plot([Series([0, 1], [1, 2], label="a"), ([0, 1], [2, 1])])
    assert len(elements(svg, "polyline", "series")) == 2
    root = ET.fromstring(svg)
    (legend,) = [g for g in root.iter(NS + "g") if g.get("class") == "legend"]
    assert "a" in [t.text for t in legend.iter(NS + "text")]
    assert "series 2" in svg


def test_single_series_has_no_legend():
    assert 'class="legend"' not in emit_plot([Series([0, 1], [1, 2])])


def test_empty_inputs():
    with pytest.raises(EmptySeriesError):
        emit_plot([])
    with pytest.raises(EmptySeriesError):
        emit_plot([Series([], [])])


def test_unmasked_nan_rejected():
    with pytest.raises(ValueError):
        emit_plot([Series([0, 1], [float("nan"), 1.0])])


def test_masked_intervals_widen_to_midpoints():
    assert masked_intervals([0, 1, 2, 3], [False, True, True, False]) == [(0.5, 2.5)]
    assert masked_intervals([0, 1], [True, False]) == [(0, 0.5)]


def test_title_is_escaped():
    svg = emit_plot([Series([0, 1], [1, 2])], title="a < b")
    assert re.search(r">a &lt; b</text>", svg)


def test_masked_rect_records_exact_bounds():
    svg = emit_plot([Series([0, 6], [1, 2])], windows=[(1.998, 2.002)])
    (rect,) = elements(svg, "rect", "masked")
    assert float(rect.get("data-lo")) == 1.998 and float(rect.get("data-hi")) == 2.002
    assert float(rect.get("width")) >= 1.0
