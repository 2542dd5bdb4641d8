"""Kernel backend selection.

The hot inner kernels (patch packing for convolution, max-pool routing)
exist twice: a compiled Cython core and a pure-numpy fallback.  At import
time the compiled core is preferred; set ``URBANGRID_KERNELS=python`` to
force the fallback (or ``=c`` to require the core).  Both backends are
bit-identical by construction.
"""

import os

from . import _fallback


def load(name):
    """Return the kernel module for backend `name` ('c' or 'python')."""
    if name == "python":
        return _fallback
    if name == "c":
        from . import _core
        return _core
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    forced = os.environ.get("URBANGRID_KERNELS")
    if forced:
        return load(forced)
    try:
        from . import _core
        return _core
    except ImportError:
        return _fallback


_active = _select()

BACKEND = _active.NAME
im2col = _active.im2col
col2im = _active.col2im
maxpool_forward = _active.maxpool_forward
maxpool_backward = _active.maxpool_backward
