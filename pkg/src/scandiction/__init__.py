"""Scanning, filtering and prediction of noisy multidimensional fields."""
from .harness import version

__version__ = version()
