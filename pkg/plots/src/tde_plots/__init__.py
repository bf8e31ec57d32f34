"""Figure rendering for extremum-TDE sweep results.

Reads the simulator's CSV output (never the simulator itself) and draws
the two standard views: error probability vs message size with the
fitted exponential-decay line, and error probability vs SNR with the
clamped upper bound overlay.
"""

__version__ = "0.1.0"

from .render import CsvFormatError, FigureSpec, load_rows, render, render_to_file

__all__ = ["CsvFormatError", "FigureSpec", "load_rows", "render", "render_to_file", "__version__"]
