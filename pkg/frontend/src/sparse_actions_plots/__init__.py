"""Presentation layer for sweep results: heatmaps and recovery curves."""

from .plots import KINDS, PlotSpec, render

__all__ = ["KINDS", "PlotSpec", "render"]
__version__ = "0.1.0"
