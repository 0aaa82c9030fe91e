"""Kernel backend selection.

The hot kernels exist twice: a compiled Cython extension (built at install
time, masks limited to 64 attributes) and a pure-Python fallback. Selection
happens once at import, controlled by the ``FDINC_BACKEND`` environment
variable: ``auto`` (default) prefers the compiled backend, ``pure`` and
``native`` force one explicitly. Callers route through :func:`kernels_for`,
which falls back to pure Python for schemas too wide for the extension.
"""

from __future__ import annotations

import os

from . import pure
from .common import BlockScan

__all__ = ["BlockScan", "active_backend", "backend_by_name", "kernels_for"]

_native = None
_native_error: str | None = None
try:
    from . import _native as _native_mod

    _native = _native_mod
except ImportError as exc:  # extension not built on this install
    _native_error = str(exc)

_choice = os.environ.get("FDINC_BACKEND", "auto").lower()
if _choice == "pure":
    _active = pure
elif _choice == "native":
    if _native is None:
        raise ImportError(
            f"FDINC_BACKEND=native but the compiled kernels are unavailable: {_native_error}"
        )
    _active = _native
else:
    _active = _native if _native is not None else pure


def active_backend():
    """The backend module selected at import time."""
    return _active


def backend_by_name(name: str):
    """Explicit backend lookup ('pure' or 'native'); used by tests and bench."""
    if name == "pure":
        return pure
    if name == "native":
        if _native is None:
            raise ImportError(f"compiled kernels unavailable: {_native_error}")
        return _native
    raise ValueError(f"unknown backend {name!r}")


def kernels_for(num_attrs: int):
    """Backend to use for a schema of ``num_attrs`` attributes."""
    if _active.MAX_ATTRS is not None and num_attrs > _active.MAX_ATTRS:
        return pure
    return _active
