"""Weighted Bergman and Besov norms on the polydisk and unit ball.

Submodules: ``series`` (multi-index power series), ``weights`` (weight
functions and the expression parser front end), ``integrate``
(deterministic quadrature), ``spaces`` (norms), ``verify`` (dilation
condition checks and convergence experiments) and ``cli``.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: F401
    IntegrationError, InvalidArgument, InvalidSpec, WBergmanError,
    WeightDomainError, WeightSyntaxError,
)
from .integrate import DomainMeasure, QuadratureSpec  # noqa: F401
from .series import PowerSeries  # noqa: F401
from .spaces import NormResult, NormSpec, norm  # noqa: F401
