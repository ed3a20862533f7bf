"""Numerical kernel backend selection.

The compiled Cython extension is preferred when present; the pure-NumPy
fallback gives identical results (up to floating-point summation order).
Set the environment variable ``TAILCOVAR_PURE_PYTHON=1`` before import to
force the fallback, e.g. for benchmarking or debugging.
"""

from __future__ import annotations

import os

if os.environ.get("TAILCOVAR_PURE_PYTHON"):
    from tailcovar._kernels import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from tailcovar._kernels import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - build-environment dependent
        from tailcovar._kernels import _fallback as _impl

        BACKEND = "python"

rect_indicator_integrals = _impl.rect_indicator_integrals
joint_tail_counts = _impl.joint_tail_counts
hr_conditional_invert = _impl.hr_conditional_invert

__all__ = [
    "BACKEND",
    "rect_indicator_integrals",
    "joint_tail_counts",
    "hr_conditional_invert",
]
