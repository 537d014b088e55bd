import xml.etree.ElementTree as ET

import pytest

from qubitnd import regions as rg
from qubitnd.fileio import RegionPoint, write_region_csv
from qubitnd.plot import plot_csvs, render_svg

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def csvs(tmp_path):
    nn = tmp_path / "nn.csv"
    write_region_csv(nn, rg.nn_lower_boundary(0.0, 11))
    pts = tmp_path / "pts.csv"
    write_region_csv(pts, [RegionPoint(0.1 * i, 0.9, "nn", f"sample;seed=0;index={i}") for i in range(5)])
    return [nn, pts]


def test_svg_is_well_formed(csvs, tmp_path):
    out = tmp_path / "a.svg"
    plot_csvs(csvs, out)
    root = ET.fromstring(out.read_text())
    assert root.tag == f"{SVG}svg"
    assert len(root.findall(f"{SVG}polyline")) == 1
    assert len(root.findall(f"{SVG}g/{SVG}circle")) == 5
    labels = [t.text for t in root.iter(f"{SVG}text")]
    assert "N(M,A)" in labels and "nn: nn boundary" in labels


def test_svg_is_byte_deterministic(csvs, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_csvs(csvs, a)
    plot_csvs(csvs, b)
    assert a.read_bytes() == b.read_bytes()


def test_labels_are_escaped():
    pts = [RegionPoint(0.5, 0.5, "nd", "sample")]
    root = ET.fromstring(render_svg([("a<b & c", "sample", pts)]))
    assert "a<b & c" in [t.text for t in root.iter(f"{SVG}text")]


def test_empty_input_rejected(tmp_path):
    with pytest.raises(ValueError):
        plot_csvs([], tmp_path / "x.svg")
