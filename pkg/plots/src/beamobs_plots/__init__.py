"""Static plots of error diagnostics from beamobs trajectory CSV files."""

from .core import EmptyDataError, MissingColumnError, PlotSpec, plot_error, read_series

__version__ = "0.1.0"
