"""Kernel dispatch: the compiled extension when importable, else Python.

Set ``CTSA_PURE_PYTHON=1`` to force the Python implementations.
"""
import os

if os.environ.get("CTSA_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

IMPLEMENTATION = _impl.IMPLEMENTATION
gauss_lm = _impl.gauss_lm
os_partition = _impl.os_partition
sw_poly = _impl.sw_poly
