"""Analysis and synthesis of strongly controllable group systems."""

__version__ = "0.1.0"
