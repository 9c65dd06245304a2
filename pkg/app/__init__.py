"""Network error-correction against myopic adversaries."""

__version__ = "0.1.0"
