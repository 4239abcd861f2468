"""
Two-panel SVG figures of a continuation: the parameter path in the a-plane on the
left, the root trajectories in the z-plane on the right.

Each panel is a 600x600 viewbox with a 5% margin and equal axis scales. Output is
built with ElementTree and fixed number formatting, so identical input gives
byte-identical documents.
"""

import xml.etree.ElementTree as ET
from collections.abc import Sequence

import numpy as np

from monodromy_kit.path_spec import ParamPath, sample

from .tracker import TrackResult

PANEL_SIZE = 600
MARGIN = 0.05
PATH_SAMPLES = 400
PALETTE = (
    '#1f77b4', '#d62728', '#2ca02c', '#ff7f0e', '#9467bd',
    '#8c564b', '#e377c2', '#7f7f7f', '#bcbd22', '#17becf',
)
_SVG_NS = 'http://www.w3.org/2000/svg'


def _num(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    """Maps complex numbers into a panel, preserving aspect ratio and flipping the imaginary axis."""

    def __init__(self, points: np.ndarray):
        re_lo, re_hi = float(points.real.min()), float(points.real.max())
        im_lo, im_hi = float(points.imag.min()), float(points.imag.max())
        span = max(re_hi - re_lo, im_hi - im_lo) or 1.0
        self.scale = PANEL_SIZE * (1 - 2 * MARGIN) / span
        self.center = complex((re_lo + re_hi) / 2, (im_lo + im_hi) / 2)

    def xy(self, z: complex) -> tuple[str, str]:
        offset = (complex(z) - self.center) * self.scale
        return _num(PANEL_SIZE / 2 + offset.real), _num(PANEL_SIZE / 2 - offset.imag)

    def points(self, zs: Sequence[complex]) -> str:
        return ' '.join(','.join(self.xy(z)) for z in zs)


def _panel(parent: ET.Element, x_offset: int, title: str) -> ET.Element:
    panel = ET.SubElement(parent, 'svg', {
        'x': str(x_offset), 'y': '0', 'width': str(PANEL_SIZE), 'height': str(PANEL_SIZE),
        'viewBox': f"0 0 {PANEL_SIZE} {PANEL_SIZE}",
    })
    ET.SubElement(panel, 'rect', {
        'x': '0', 'y': '0', 'width': str(PANEL_SIZE), 'height': str(PANEL_SIZE),
        'fill': 'white', 'stroke': '#cccccc',
    })
    label = ET.SubElement(panel, 'text', {'x': '10', 'y': '20', 'font-family': 'sans-serif', 'font-size': '14'})
    label.text = title
    return panel


def _marker(panel: ET.Element, frame: _Frame, z: complex, color: str, start: bool):
    x, y = frame.xy(z)
    if start:
        ET.SubElement(panel, 'circle', {'cx': x, 'cy': y, 'r': '4', 'fill': color})
    else:
        ET.SubElement(panel, 'rect', {
            'x': _num(float(x) - 4), 'y': _num(float(y) - 4), 'width': '8', 'height': '8',
            'fill': 'none', 'stroke': color, 'stroke-width': '1.5',
        })


def plot_trajectories(result: TrackResult, path: ParamPath) -> str:
    """
    Render the parameter path and the root trajectories as one SVG document.

    Circles mark start positions, squares end positions; root i is drawn in PALETTE[i].

    Raises:
        ValueError: if there are no trajectories.
    """
    if result.positions.size == 0:
        raise ValueError("Nothing to plot: no trajectories")
    root = ET.Element('svg', {
        'xmlns': _SVG_NS, 'width': str(2 * PANEL_SIZE), 'height': str(PANEL_SIZE),
        'viewBox': f"0 0 {2 * PANEL_SIZE} {PANEL_SIZE}",
    })

    a_points = sample(path, path.length / PATH_SAMPLES) if path.length > 0 else np.array([path.start], dtype=complex)
    a_frame = _Frame(a_points)
    a_panel = _panel(root, 0, 'a-plane')
    ET.SubElement(a_panel, 'polyline', {
        'points': a_frame.points(a_points), 'fill': 'none', 'stroke': '#333333', 'stroke-width': '1.5',
    })
    _marker(a_panel, a_frame, a_points[0], '#333333', start=True)

    z_frame = _Frame(result.positions.ravel())
    z_panel = _panel(root, PANEL_SIZE, 'z-plane')
    for i in range(result.n):
        color = PALETTE[i % len(PALETTE)]
        trajectory = result.positions[:, i]
        ET.SubElement(z_panel, 'polyline', {
            'points': z_frame.points(trajectory), 'fill': 'none', 'stroke': color, 'stroke-width': '1.5',
        })
        _marker(z_panel, z_frame, trajectory[0], color, start=True)
        _marker(z_panel, z_frame, trajectory[-1], color, start=False)

    return ET.tostring(root, encoding='unicode') + '\n'
