"""Hot-kernel backend selection: numba-compiled by default, pure numpy as a
fallback.

The lane is chosen at import time from ``PULSELAB_BACKEND`` (``numba`` or
``numpy``); when unset, numba is used if it imports.  ``use_backend`` switches
lanes at runtime (the benchmark script times both in one process).
"""
from __future__ import annotations

import contextlib
import os
from types import ModuleType

from . import _kernels_numpy

__all__ = ["active_backend", "available_backends", "set_backend", "use_backend", "kernels"]

_IMPLS: dict[str, ModuleType] = {"numpy": _kernels_numpy}

try:  # pragma: no cover - exercised indirectly
    from . import _kernels_numba
    _IMPLS["numba"] = _kernels_numba
except ImportError:  # numba unavailable: numpy lane only
    pass

_env = os.environ.get("PULSELAB_BACKEND", "").strip().lower()
if _env:
    if _env not in _IMPLS:
        raise ImportError(
            f"PULSELAB_BACKEND={_env!r} is not available; "
            f"choose one of {sorted(_IMPLS)}")
    _active = _env
else:
    _active = "numba" if "numba" in _IMPLS else "numpy"


def available_backends() -> list[str]:
    return sorted(_IMPLS)


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}; available: {sorted(_IMPLS)}")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def kernels() -> ModuleType:
    return _IMPLS[_active]
