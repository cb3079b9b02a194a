"""Analysis toolkit for Boolean PCSP polymorphism minions.

Submodules: ``boolfn`` (functions and minor maps), ``fourier`` (p-biased
analysis), ``pullback`` (2-to-1 minors), ``shapley``, ``lp`` and ``ptf``
(threshold representations), ``pcsp`` (templates, polymorphisms, choice
conditions), ``labelcover`` and ``cli``.
"""
from ._backend import BACKEND
from .boolfn import ArityError, BooleanFunction, MinorMap, TwoToOneMap, apply_minor
from .fourier import expand, flip_probability, influence, total_influence
from .rng import make_rng

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ArityError", "BooleanFunction", "MinorMap", "TwoToOneMap", "apply_minor",
    "expand", "flip_probability", "influence", "total_influence", "make_rng",
]
