"""Kernel backend selection.

The two hot loops (per-pair long-link sampling and shortest-path flooding)
exist twice: a compiled Cython module and a pure-Python/NumPy fallback with
identical semantics.  The compiled one is preferred when importable; set the
environment variable ``GRIDFORK_PURE=1`` to force the fallback.
"""

import os

from . import pure

if os.environ.get("GRIDFORK_PURE"):
    _impl = pure
else:
    try:
        from . import _cext as _impl
    except ImportError:
        _impl = pure

sample_long_edges = _impl.sample_long_edges
dijkstra = _impl.dijkstra


def backend_name() -> str:
    """Name of the active backend: 'cext' or 'pure'."""
    return "cext" if _impl is not pure else "pure"


def available_backends():
    """All importable backend modules keyed by name."""
    out = {"pure": pure}
    try:
        from . import _cext

        out["cext"] = _cext
    except ImportError:
        pass
    return out
