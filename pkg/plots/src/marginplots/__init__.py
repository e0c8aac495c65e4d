from .errors import MarginPlotsError, MissingFileError, SchemaMismatchError
from .render import KINDS, PlotSpec, render

__all__ = [
    "KINDS",
    "MarginPlotsError",
    "MissingFileError",
    "PlotSpec",
    "SchemaMismatchError",
    "render",
]
