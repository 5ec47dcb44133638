"""Kernel backend selection.

Hot loops (stencils, Euler updates, tetrahedral curve extraction, the Gauss
double sum) exist twice: a numba-jitted version and a pure-numpy version with
identical semantics. The active backend is chosen by the EMTOPO_BACKEND
environment variable (auto, numba, numpy) and can be switched at runtime
with use(). "auto" prefers numba when it imports cleanly.
"""
import os

from . import _kernels_numpy

try:
    from . import _kernels_numba
    HAVE_NUMBA = True
except ImportError:
    _kernels_numba = None
    HAVE_NUMBA = False

_active = None


def _resolve(name):
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _kernels_numba
    if name == "auto":
        return _kernels_numba if HAVE_NUMBA else _kernels_numpy
    raise ValueError("unknown backend %r (expected auto, numba, or numpy)" % (name,))


def use(name):
    """Select the kernel backend by name; returns the module now in use."""
    global _active
    _active = _resolve(name)
    return _active


def kernels():
    """The active kernel module (resolving EMTOPO_BACKEND on first use)."""
    global _active
    if _active is None:
        _active = _resolve(os.environ.get("EMTOPO_BACKEND", "auto"))
    return _active


def name():
    """Name of the active backend, 'numba' or 'numpy'."""
    return "numba" if kernels() is _kernels_numba else "numpy"
