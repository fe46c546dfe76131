"""Boundedness of interpolated operators between Lorentz-Karamata spaces."""
from .asymcalc import EndpointSymbol, Side, Tag, Verdict
from .svfunc import LogCoord, parse

__version__ = "0.1.0"

__all__ = ["EndpointSymbol", "Side", "Tag", "Verdict", "LogCoord", "parse", "__version__"]
