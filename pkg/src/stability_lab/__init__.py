"""Stability operators ``Delta + V - a K`` on rotationally symmetric surfaces.

Geodesic-disk geometry, index-form inequalities, the asymptotics of their
error terms and radial spectral computations, all reduced to one-dimensional
quadrature and shooting.
"""

from .cutoff import AlphaParams, CutoffSpec
from .errors import (
    DegenerateMetricError,
    DegenerateNormalizationError,
    DomainError,
    FitUndefinedError,
    IntegrationError,
    PreconditionError,
    StabilityLabError,
)
from .indexform import InequalityReport
from .metric import DiskGeometry, StepProfile, WarpedMetric
from .potential import Potential, StabilityParams
from .spectral import DistanceBoundResult, SpectralResult

__version__ = "0.1.0"

__all__ = [
    "AlphaParams",
    "CutoffSpec",
    "DegenerateMetricError",
    "DegenerateNormalizationError",
    "DiskGeometry",
    "DistanceBoundResult",
    "DomainError",
    "FitUndefinedError",
    "InequalityReport",
    "IntegrationError",
    "Potential",
    "PreconditionError",
    "SpectralResult",
    "StabilityLabError",
    "StabilityParams",
    "StepProfile",
    "WarpedMetric",
]
