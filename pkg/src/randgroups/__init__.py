"""Random groups in the standard and positive (n, k, d) models."""

from .presentation import ModelParams, Presentation
from .sampler import sample, target_size

__all__ = ["ModelParams", "Presentation", "sample", "target_size"]
__version__ = "0.1.0"
