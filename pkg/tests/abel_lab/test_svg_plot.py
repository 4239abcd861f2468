import xml.etree.ElementTree as ET

import numpy as np
import pytest

from abel_lab.svg_plot import PALETTE, plot_trajectories
from abel_lab.tracker import TrackResult, track
from monodromy_kit.family_kit import parse_family
from monodromy_kit.path_spec import Lasso, ParamPath, compile_lasso

QUADRATIC = parse_family("z^2 - 2*z + a")
LOOP = compile_lasso(Lasso(0, 1, 0.01))


@pytest.fixture(scope='module')
def quadratic_svg():
    return plot_trajectories(track(QUADRATIC, LOOP, [0, 2]), LOOP)


def test_document_shape(quadratic_svg):
    assert quadratic_svg.startswith('<svg')
    assert quadratic_svg.endswith('</svg>\n')
    assert 'viewBox="0 0 1200 600"' in quadratic_svg
    # path, then one trajectory per root
    assert quadratic_svg.count('<polyline') == 3
    assert PALETTE[0] in quadratic_svg and PALETTE[1] in quadratic_svg


def test_well_formed_xml(quadratic_svg):
    root = ET.fromstring(quadratic_svg)
    assert root.tag.endswith('svg')
    assert len(root.findall('.//{*}polyline')) == 3


def test_deterministic(quadratic_svg):
    again = plot_trajectories(track(QUADRATIC, LOOP, [0, 2]), LOOP)
    assert again == quadratic_svg


def test_null_path():
    path = ParamPath.stationary(0.5)
    svg = plot_trajectories(track(parse_family("z^3 - 3*z + a"), path), path)
    assert svg.count('<polyline') == 4


def test_nothing_to_plot():
    empty = TrackResult(None, np.empty(0), np.empty((0, 2), dtype=complex), np.inf, 0)
    with pytest.raises(ValueError):
        plot_trajectories(empty, LOOP)
