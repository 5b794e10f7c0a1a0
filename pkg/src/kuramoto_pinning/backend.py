"""Kernel backend selection.

The compiled Cython extension is used when importable; otherwise the numpy
fallback. Set ``KURAMOTO_PINNING_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import logging
import os
from types import ModuleType

from . import _kernels_py

logger = logging.getLogger(__name__)

ENV_VAR = "KURAMOTO_PINNING_BACKEND"


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


compiled = _load_compiled()
python = _kernels_py


def get(name: str | None = None) -> ModuleType:
    """Kernel module for ``name`` in {"auto", "cython", "python"}."""
    name = (name or os.environ.get(ENV_VAR) or "auto").lower()
    if name == "python":
        return python
    if name in ("cython", "compiled"):
        if compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return compiled
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    if compiled is None:
        logger.debug("compiled kernels unavailable, using numpy fallback")
        return python
    return compiled


def name_of(mod: ModuleType) -> str:
    return "cython" if mod is compiled and compiled is not None else "python"
