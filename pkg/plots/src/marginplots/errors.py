class MarginPlotsError(Exception):
    """Base class for rendering failures."""


class MissingFileError(MarginPlotsError):
    """An input file named in the plot spec does not exist."""


class SchemaMismatchError(MarginPlotsError):
    """An input file exists but its header or fields do not match the
    documented schema for the requested plot kind."""
