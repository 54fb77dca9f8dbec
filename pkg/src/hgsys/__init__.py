"""Exact verification of Hopf-Galois systems and quantum torsors on presented algebras."""
from .cache import Context
from .cartan import A1, A2, A1xA1, CartanDatum, CocycleSpec, LieDatum
from .engine import Element, Presentation, complete, graded_dimension
from .scalars import Scalar

__all__ = ["A1", "A2", "A1xA1", "CartanDatum", "CocycleSpec", "Context", "Element", "LieDatum",
           "Presentation", "Scalar", "complete", "graded_dimension"]
