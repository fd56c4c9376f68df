"""
Output for simulation results: CSV tables, SVG plots and console summaries.

CSV and SVG output is deterministic, so running the same scenario twice
produces the same bytes. The Display class prints a readable summary of a
run to the console.
"""

import csv
import io
import math
import os
import sys
from typing import BinaryIO, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import matplotlib
from matplotlib.figure import Figure
from matplotlib.patches import Circle

from scenarios import ScenarioConfig, TimeSeriesRecord


CSV_HEADER = ('t', 's_x', 's_y', 's_z', 's_len', 't_x', 't_y', 't_z', 't_len',
              'doe', 'capacity', 'entropy_B', 'purity')

PLOT_KINDS = ('bloch', 'doe', 'capacity', 'projection')

# Values smaller than this are written as 0
ZERO_SNAP = 1e-12

# Line styles by series position: solid first, then dotted
LINE_STYLES = (('solid', '-'), ('dot', ':'), ('dash', '--'), ('dashdot', '-.'))

# Radius of the reference circle in the projection plot
SPHERE_RADIUS = 0.4

Destination = Union[str, BinaryIO, None]
SeriesInput = Union[List[TimeSeriesRecord], Dict[str, List[TimeSeriesRecord]]]


def _format_value(value: float) -> str:
    """Format a number with 9 significant digits, snapping round-off to 0."""
    if abs(value) < ZERO_SNAP:
        value = 0.0
    return f"{value:.9g}"


def csv_row(record: TimeSeriesRecord) -> List[str]:
    """Format one record as CSV fields in CSV_HEADER order."""
    values = [*record.s, record.s_len, *record.t_vec, record.t_len,
              record.doe, record.capacity, record.entropy_B, record.purity]
    return [f"{record.t:.9f}"] + [_format_value(float(v)) for v in values]


def _write(data: bytes, destination: Destination) -> None:
    """Write bytes to a path or a binary stream (None writes nothing)."""
    if destination is None:
        return
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, 'wb') as handle:
            handle.write(data)
    else:
        destination.write(data)


def emit_csv(records: List[TimeSeriesRecord], destination: Destination = None) -> bytes:
    """
    Write records as CSV (UTF-8, LF line endings).

    Args:
        records: Time series to write (must not be empty)
        destination: File path, binary stream, or None to only return the bytes

    Returns:
        The CSV bytes

    Raises:
        ValueError: If records is empty
        OSError: If the destination cannot be written
    """
    if not records:
        raise ValueError("no records to write")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(csv_row(record))

    data = buffer.getvalue().encode('utf-8')
    _write(data, destination)
    return data


def _as_series(records: SeriesInput) -> Dict[str, List[TimeSeriesRecord]]:
    """Accept a single list or a label -> records mapping."""
    if isinstance(records, dict):
        series = {label or f"series {i + 1}": values
                  for i, (label, values) in enumerate(records.items())}
    else:
        series = {'': records}
    if not series or any(not values for values in series.values()):
        raise ValueError("no records to plot")
    return series


def _draw_curve(axes, times, values, style_index: int, name: str, label: str) -> None:
    """Draw one curve; its SVG group id names the line style class."""
    style_class, style = LINE_STYLES[style_index % len(LINE_STYLES)]
    line, = axes.plot(times, values, linestyle=style, color='black', linewidth=1.2,
                      label=label)
    line.set_gid(f"{style_class}-{name}")


def _plot_bloch(axes, series: Dict[str, List[TimeSeriesRecord]]) -> None:
    """Bloch-vector lengths: first qubit solid, second qubit dotted."""
    offset = 0
    for label, records in series.items():
        times = [r.t for r in records]
        prefix = f"{label} " if label else ""
        _draw_curve(axes, times, [r.s_len for r in records], offset, 's_len', f"{prefix}|s|")
        _draw_curve(axes, times, [r.t_len for r in records], offset + 1, 't_len', f"{prefix}|t|")
        offset += 2
    axes.set_ylabel("Bloch vector length")
    axes.set_ylim(0.0, 1.05)


def _plot_scalar(axes, series: Dict[str, List[TimeSeriesRecord]], name: str,
                 axis_label: str) -> None:
    """One curve per series for a scalar field such as doe or capacity."""
    for index, (label, records) in enumerate(series.items()):
        _draw_curve(axes, [r.t for r in records], [getattr(r, name) for r in records],
                    index, name, label or name)
    axes.set_ylabel(axis_label)


def _plot_projection(axes, series: Dict[str, List[TimeSeriesRecord]]) -> None:
    """First-qubit Bloch vectors projected on the x-y plane."""
    axes.add_patch(Circle((0.0, 0.0), SPHERE_RADIUS, fill=False, linestyle=':', color='gray'))
    for label, records in series.items():
        for record in records:
            s_x, s_y = float(record.s[0]), float(record.s[1])
            axes.annotate('', xy=(s_x, s_y), xytext=(0.0, 0.0),
                          arrowprops={'arrowstyle': '->', 'color': 'black'})
            axes.text(s_x, s_y, f"{record.t:g}", fontsize=7)
    axes.set_xlim(-1.05, 1.05)
    axes.set_ylim(-1.05, 1.05)
    axes.set_aspect('equal')
    axes.set_xlabel("s_x")
    axes.set_ylabel("s_y")


def emit_plot(records: SeriesInput, destination: Destination = None, which: str = 'bloch',
              title: Optional[str] = None) -> bytes:
    """
    Draw a self-contained SVG line chart of one quantity against time.

    Args:
        records: One series, or a mapping label -> series for several curves
        destination: File path, binary stream, or None to only return the bytes
        which: 'bloch', 'doe', 'capacity' or 'projection'
        title: Optional chart title

    Returns:
        The SVG bytes
    """
    if which not in PLOT_KINDS:
        raise ValueError(f"plot kind must be one of {PLOT_KINDS}, got {which!r}")
    series = _as_series(records)

    figure = Figure(figsize=(6.4, 4.0))
    axes = figure.add_subplot(1, 1, 1)

    if which == 'bloch':
        _plot_bloch(axes, series)
    elif which == 'doe':
        _plot_scalar(axes, series, 'doe', "Degree of entanglement")
    elif which == 'capacity':
        _plot_scalar(axes, series, 'capacity', "Capacity (bits)")
    else:
        _plot_projection(axes, series)

    if which != 'projection':
        axes.set_xlabel("Scaled time")
        if len(series) > 1 or which == 'bloch':
            axes.legend(frameon=False)
    if title:
        axes.set_title(title)

    buffer = io.BytesIO()
    # Same bytes on every run: fixed id salt, no date, text drawn as paths
    with matplotlib.rc_context({'svg.hashsalt': 'qubit-pair-simulator',
                                'svg.fonttype': 'path'}):
        figure.savefig(buffer, format='svg', metadata={'Date': None})

    data = buffer.getvalue()
    _write(data, destination)
    return data


def bloch_angles(vector: Sequence[float]) -> Tuple[float, float]:
    """
    Polar and azimuthal angles (radians) of a Bloch vector.

    A zero vector has no direction; (0, 0) is returned for it.
    """
    x, y, z = (float(v) for v in vector)
    length = math.sqrt(x * x + y * y + z * z)
    if length < ZERO_SNAP:
        return 0.0, 0.0
    theta = math.acos(max(-1.0, min(1.0, z / length)))
    phi = math.atan2(y, x)
    return theta, phi


class Display:
    """
    Prints run information and result summaries to the console.

    Colors are used only when the terminal supports them and they were
    not turned off.
    """

    def __init__(self, use_color: bool = True, width: int = 72, stream=None):
        """
        Initialize display settings.

        Args:
            use_color: Whether to use ANSI color codes
            width: Console width for headers and rules
            stream: Where to print (defaults to standard output)
        """
        self.stream = stream or sys.stdout
        self.use_color = use_color and self._supports_color()
        self.width = width
        self.color_codes = {
            'red': '\033[91m',
            'green': '\033[92m',
            'bold': '\033[1m',
            'reset': '\033[0m',
        }

    def _supports_color(self) -> bool:
        """Check if the terminal supports color output."""
        if os.environ.get('NO_COLOR'):
            return False
        if not hasattr(self.stream, 'isatty') or not self.stream.isatty():
            return False
        term = os.environ.get('TERM', '')
        return term != 'dumb'

    def _colorize(self, text: str, color: str) -> str:
        """Apply color to text if colors are enabled."""
        if not self.use_color or color not in self.color_codes:
            return text
        return f"{self.color_codes[color]}{text}{self.color_codes['reset']}"

    def _print(self, text: str = "") -> None:
        print(text, file=self.stream)

    def display_header(self, title: str) -> None:
        """Display a formatted header."""
        self._print("=" * self.width)
        self._print(self._colorize(title.center(self.width), 'bold'))
        self._print("=" * self.width)

    def display_config(self, cfg: ScenarioConfig) -> None:
        """Show the parameters of a run."""
        self._print(f"Series:      {cfg.label or '-'}  {cfg.description}")
        self._print(f"Initial:     a = {cfg.a:.6f}, b = {cfg.b:.6f}")
        self._print(f"Field:       nbar = {cfg.nbar:g}, cutoff = {cfg.resolved_cutoff()}")
        self._print(f"Coupling:    R = {cfg.R:g}")
        if cfg.snapshot_times is not None:
            self._print(f"Times:       {len(cfg.snapshot_times)} snapshots")
        else:
            self._print(f"Times:       0 .. {cfg.t_max:g} in {cfg.steps} steps")
        self._print(f"Propagator:  {cfg.propagator}")

    def display_summary(self, records: List[TimeSeriesRecord]) -> None:
        """Show the extrema of the main quantities and when they occur."""
        times = np.array([r.t for r in records])
        self._print("-" * self.width)
        self._print(f"{'quantity':<12}{'min':>12}{'at t':>10}{'max':>12}{'at t':>10}")
        for name in ('s_len', 't_len', 'doe', 'capacity'):
            values = np.array([getattr(r, name) for r in records])
            low, high = int(np.argmin(values)), int(np.argmax(values))
            self._print(f"{name:<12}{values[low]:>12.6f}{times[low]:>10.3f}"
                        f"{values[high]:>12.6f}{times[high]:>10.3f}")

    def display_snapshots(self, records: List[TimeSeriesRecord]) -> None:
        """Show the first qubit's Bloch vector at each snapshot time."""
        self._print("-" * self.width)
        self._print(f"{'t':>6}{'s_x':>10}{'s_y':>10}{'s_z':>10}{'|s|':>9}"
                    f"{'theta':>9}{'phi':>9}")
        for record in records:
            theta, phi = bloch_angles(record.s)
            s_x, s_y, s_z = (float(v) for v in record.s)
            self._print(f"{record.t:>6.2f}{s_x:>10.5f}{s_y:>10.5f}{s_z:>10.5f}"
                        f"{record.s_len:>9.5f}{theta:>9.4f}{phi:>9.4f}")

    def display_oracle_status(self, checked: bool) -> None:
        """Report whether the full propagator confirmed the results."""
        if checked:
            self._print(self._colorize("Oracle check: blockwise and full propagators agree",
                                       'green'))

    def display_presets(self, presets: List[Tuple[str, str]]) -> None:
        """List the available presets."""
        self.display_header("Figure presets")
        for name, description in presets:
            self._print(f"  {name:<7} {description}")

    def display_error(self, message: str) -> None:
        """Show an error message on standard error."""
        text = f"Error: {message}"
        if self.use_color:
            text = self._colorize(text, 'red')
        print(text, file=sys.stderr)
