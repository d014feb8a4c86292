"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise, or when
``GHZFORGE_PURE_PYTHON=1`` is set, the numpy fallback is used.
"""
from __future__ import annotations

import os

from . import _fallback

_compiled = None
if os.environ.get("GHZFORGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

_active = _compiled if _compiled is not None else _fallback
BACKEND = _active.BACKEND


def available() -> dict:
    out = {"python": _fallback}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def get(name: str | None = None):
    """Kernel module by name; the active backend when ``name`` is None."""
    if name is None:
        return _active
    try:
        return available()[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None
