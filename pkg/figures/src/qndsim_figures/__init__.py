"""Figure rendering for qndsim CSV artifacts."""

from .render import KINDS, render

__version__ = "0.1.0"
