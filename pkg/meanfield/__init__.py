"""Two-species mean field equations on the unit disc, solved through one radial shooting problem."""

__version__ = "0.3.0"
