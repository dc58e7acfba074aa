"""Exact and asymptotic enumeration of p-ary hypercube decompositions."""

from hypercat.core import Params

__all__ = ["Params"]
__version__ = "0.1.0"
