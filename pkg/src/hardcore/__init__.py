"""Hard-core lattice gas on boxes of Z^d: exact oracles, odd cutsets and exact sampling."""

from .lattice import Box
from .gibbs import BoundaryCondition, Configuration

__version__ = "0.1.0"

__all__ = ["Box", "BoundaryCondition", "Configuration", "__version__"]
