"""Kernel selection: compiled Cython core if importable, numpy otherwise.

Set ``MINIONLAB_PURE=1`` to force the numpy kernels.
"""
import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if not os.environ.get("MINIONLAB_PURE"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"

butterfly_forward = kernels.butterfly_forward
butterfly_inverse = kernels.butterfly_inverse
biased_mean = kernels.biased_mean
flip_mass = kernels.flip_mass
minor_table = kernels.minor_table
pivot_counts = kernels.pivot_counts
subset_zeta = kernels.subset_zeta
popcounts = _kernels_py.popcounts
