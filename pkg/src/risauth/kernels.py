"""Backend selection for the trial kernels.

The compiled extension is used when it imports; otherwise the numpy reference
in ``_kernels_py`` is. Set ``RISAUTH_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py


def load_backend(name: str = "auto") -> ModuleType:
    """Return the kernel module for ``"cython"``, ``"python"`` or ``"auto"``."""
    if name == "python":
        return _kernels_py
    try:
        from . import _kernels
    except ImportError:
        if name == "cython":
            raise
        return _kernels_py
    return _kernels


def _select() -> ModuleType:
    if os.environ.get("RISAUTH_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py
    return load_backend("auto")


_backend = _select()
BACKEND = "cython" if _backend is not _kernels_py else "python"

pilot_stats = _backend.pilot_stats
profile_scores = _backend.profile_scores
profile_voltages = _backend.profile_voltages


def circuit_args(cp) -> tuple[float, ...]:
    """Scalar circuit parameters in kernel argument order."""
    return (float(cp.k_hrv), float(cp.k_dem), float(cp.alpha), float(cp.v_d),
            float(cp.divider_ratio), float(cp.p_min))
