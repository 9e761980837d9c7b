"""Backend selection for the stepping kernel.

The compiled ``_kernel`` extension is preferred; when it cannot be
imported (no compiler at install time) or ``PONCELET_PURE_PYTHON`` is set,
the pure-Python ``_kernel_py`` twin is used instead.  Both produce the same
floating point results up to libm differences in ``pow``.
"""

import os

from . import _kernel_py

if os.environ.get("PONCELET_PURE_PYTHON"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _kernel_py

BACKEND = "cython" if _impl is not _kernel_py else "python"

tangency = _impl.tangency
tangency_superellipse = _impl.tangency_superellipse
tangency_conic = _impl.tangency_conic
chord_exit_superellipse = _impl.chord_exit_superellipse
step = _impl.step
orbit = _impl.orbit
lift_map = _impl.lift_map
rotation_bracket = _impl.rotation_bracket

__all__ = [
    "BACKEND",
    "tangency",
    "tangency_superellipse",
    "tangency_conic",
    "chord_exit_superellipse",
    "step",
    "orbit",
    "lift_map",
    "rotation_bracket",
]
