"""kinmorph: morphological analysis and disambiguation of Kinyarwanda verbs."""

__version__ = "0.1.0"

from .analyzer import Analyzer, active_kernel_name
from .segmentation import Segmentation, indicator_features, parse, serialize

__all__ = [
    "Analyzer",
    "Segmentation",
    "active_kernel_name",
    "indicator_features",
    "parse",
    "serialize",
]
