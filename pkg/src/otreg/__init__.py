"""otreg: a planar optimal-transport regularity laboratory."""

__version__ = "0.1.0"
