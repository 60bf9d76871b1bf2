"""Function-level vulnerability prediction for JavaScript projects."""

__version__ = "0.1.0"
