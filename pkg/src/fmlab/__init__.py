"""fmlab: a numerical laboratory for the rank-one Friedrichs model."""

__version__ = "0.1.0"
