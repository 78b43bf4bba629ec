"""First Dirichlet eigenvalues of balls and bands in warped-product models."""

from .models import (
    DomainError,
    DomainKind,
    DomainSpec,
    ModelError,
    RadialFunction,
    Warping,
    WarpedModel,
    drift_coefficient,
    volume_density,
)
from .radial_solver import EigenEstimate, fd_oracle, first_eigenvalue, shoot

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "DomainKind",
    "DomainSpec",
    "EigenEstimate",
    "ModelError",
    "RadialFunction",
    "Warping",
    "WarpedModel",
    "drift_coefficient",
    "fd_oracle",
    "first_eigenvalue",
    "shoot",
    "volume_density",
]
