"""p-adic computations for parahoric overconvergent cohomology of GL(2n)."""
from .padic import PadicNumber, PadicMatrix, valuation
from .weights import Weight, crit_range

__all__ = ["PadicNumber", "PadicMatrix", "Weight", "crit_range", "valuation"]
__version__ = "0.1.0"
