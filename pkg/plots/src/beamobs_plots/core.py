"""CSV parsing and line-plot rendering for trajectory diagnostics.

The input is the simulator's trajectory CSV (column `t` plus diagnostic
columns such as `err_weighted` or `errmode_3`).  Reading is strictly
read-only; one invocation renders one series against time into a static
image file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class MissingColumnError(ValueError):
    """Requested series is not a column of the CSV."""


class EmptyDataError(ValueError):
    """CSV has a header but no data rows."""


@dataclass(frozen=True)
class PlotSpec:
    """What to plot and where to put it."""

    csv_path: str
    series: str
    out_path: str
    xlabel: str = "t [s]"
    ylabel: str | None = None
    title: str | None = None


def read_series(csv_path, column: str) -> tuple[list[float], list[float]]:
    """Return (t, values) for one named column of a trajectory CSV."""
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataError(f"{csv_path} is empty") from None
        if column not in header:
            raise MissingColumnError(
                f"column {column!r} not in {csv_path} "
                f"(available: {', '.join(header)})"
            )
        t_idx = header.index("t")
        col_idx = header.index(column)
        times, values = [], []
        for row in reader:
            times.append(float(row[t_idx]))
            values.append(float(row[col_idx]))
    if not times:
        raise EmptyDataError(f"{csv_path} contains no data rows")
    return times, values


def plot_error(csv_path, spec: PlotSpec) -> int:
    """Render spec.series against time; returns the number of plotted points.

    ``csv_path`` overrides spec.csv_path when given (pass None to use the
    spec's own path).
    """
    path = csv_path if csv_path is not None else spec.csv_path
    times, values = read_series(path, spec.series)

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(times, values, linewidth=1.0)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel if spec.ylabel is not None else spec.series)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return len(times)
