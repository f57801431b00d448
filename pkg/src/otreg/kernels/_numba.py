"""numba-compiled versions of the hot kernels."""

from numba import njit

from . import _impl

clip_cells = njit(cache=True)(_impl.clip_cells)
eval_argmax = njit(cache=True)(_impl.eval_argmax)
edge_lengths = njit(cache=True)(_impl.edge_lengths)
