"""Service layer: the operations on skew products, their attractors and measures."""

from skewgraph.services.attractor_service import AttractorService, AttractorValidator
from skewgraph.services.measure_service import MeasureService
from skewgraph.services.splitting_service import SplittingService, fit_log_decay
from skewgraph.services.zoo_service import PRESETS, Preset, ZooService

__all__ = [
    "AttractorService",
    "AttractorValidator",
    "MeasureService",
    "SplittingService",
    "ZooService",
    "Preset",
    "PRESETS",
    "fit_log_decay",
]
