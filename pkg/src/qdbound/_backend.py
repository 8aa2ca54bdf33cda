"""Kernel backend selection for the dyad-search estimator.

The compiled extension is preferred when importable; the pure-numpy kernel is
the fallback.  ``QDBOUND_BACKEND`` forces the choice: ``compiled`` raises if
the extension is missing, ``python`` skips it.  Both kernels implement the
same recurrence; ``benchmarks/bench_ascent.py`` compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

from . import _ascent_py

_choice = os.environ.get("QDBOUND_BACKEND", "auto").lower()
if _choice not in ("auto", "compiled", "python"):
    raise RuntimeError(f"QDBOUND_BACKEND={_choice!r} not in auto|compiled|python")

_compiled = None
if _choice in ("auto", "compiled"):
    try:
        from . import _ascent as _compiled  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def ascend_batch(
    lmat: np.ndarray,
    u0: np.ndarray,
    v0: np.ndarray,
    iters: int,
    golden_steps: int = _ascent_py.GOLDEN_STEPS,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dispatch the restart batch to the active (or explicitly named) kernel."""
    use = backend or BACKEND
    if use == "python" or _compiled is None:
        return _ascent_py.ascend_batch(lmat, u0, v0, iters, golden_steps)
    lmat_f = np.asfortranarray(lmat, dtype=complex)
    u = np.ascontiguousarray(u0, dtype=complex).copy()
    v = np.ascontiguousarray(v0, dtype=complex).copy()
    f = np.empty(u.shape[0])
    for r in range(u.shape[0]):
        f[r] = _compiled.ascend(lmat_f, u[r], v[r], iters, golden_steps)
    return f, u, v
