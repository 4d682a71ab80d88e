"""Battery co-optimization for data-center peak shaving and frequency regulation."""

__version__ = "0.1.0"
