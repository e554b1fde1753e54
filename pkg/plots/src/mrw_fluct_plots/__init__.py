"""Offline figure rendering for mrw-fluct CSV dumps."""

from .render import PlotSpec, render

__version__ = "0.1.0"
