"""Exact computations around dynamical Mordell-Lang for split maps of A^1 x P^1 over Q."""

from .affine import AffinePolyMap
from .errors import BudgetExceeded, DmlError, DomainError, ParseError
from .exact_arith import ARCHIMEDEAN, ExactLog, Place, abs_v, valuation
from .projective import Mobius, ProjPoint, ProjRatMap
from .return_set import PlaneCurve

__version__ = "0.1.0"
