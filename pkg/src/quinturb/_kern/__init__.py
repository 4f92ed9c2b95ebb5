"""Kernel lane selection for the hot lattice sums.

Two interchangeable lanes compute the same leading-entry partials:

* ``pure``   — vectorized NumPy (always available);
* ``cython`` — compiled extension (used when built).

``QUINTURB_KERNEL`` picks the lane: ``auto`` (default; compiled if present),
``cython`` (require compiled, raise if missing), or ``pure``.  Both lanes
produce one partial per leading window entry; totals are folded from partials
in window order, so results are independent of worker scheduling.
"""
from __future__ import annotations

import os

from .pure import KernelContext
from . import pure

__all__ = ["KernelContext", "LANE", "kernel_a_partial", "kernel_b_partial"]

_choice = os.environ.get("QUINTURB_KERNEL", "auto").strip().lower()
if _choice not in ("auto", "cython", "pure"):
    raise ValueError(
        f"QUINTURB_KERNEL must be one of auto/cython/pure, got {_choice!r}"
    )

LANE = "pure"
_impl = pure
if _choice in ("auto", "cython"):
    try:
        from . import _fast  # type: ignore[attr-defined]

        _impl = _fast
        LANE = "cython"
    except ImportError:
        if _choice == "cython":
            raise ImportError(
                "QUINTURB_KERNEL=cython but the compiled kernel module is "
                "not available; rebuild the package or use QUINTURB_KERNEL=pure"
            ) from None

kernel_a_partial = _impl.kernel_a_partial
kernel_b_partial = _impl.kernel_b_partial
