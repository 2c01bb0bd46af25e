"""Linked salient/faint palette generation for multiclass scatterplots."""

__version__ = "0.1.0"
