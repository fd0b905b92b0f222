"""Kernel backend selection.

The hot numerical kernels (seeded normal stream, least-squares solve,
regularized incomplete beta) exist twice: a compiled Cython module
(_speedups) and a pure-Python reference (_pyref).  At import time we pick
the compiled one when present and fall back silently otherwise, so the
package works on installs without a C compiler.

Set DLGD_KERNEL_BACKEND=python or =compiled to force a backend; forcing
"compiled" raises if the extension is missing instead of falling back.
The active choice is exposed as BACKEND.
"""

from __future__ import annotations

import os

from dlgdkit._kernels import _pyref

_forced = os.environ.get("DLGD_KERNEL_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _pyref
    BACKEND = "python"
elif _forced == "compiled":
    from dlgdkit._kernels import _speedups as _impl  # noqa: F401

    BACKEND = "compiled"
elif _forced:
    raise ValueError(
        f"DLGD_KERNEL_BACKEND must be 'python' or 'compiled', got {_forced!r}"
    )
else:
    try:
        from dlgdkit._kernels import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pyref
        BACKEND = "python"

normal_stream = _impl.normal_stream
ols_solve = _impl.ols_solve
reg_inc_beta = _impl.reg_inc_beta

GAMMA = _pyref.GAMMA
TWO_PI = _pyref.TWO_PI
RANK_TOL = _pyref.RANK_TOL

__all__ = [
    "BACKEND",
    "GAMMA",
    "RANK_TOL",
    "TWO_PI",
    "normal_stream",
    "ols_solve",
    "reg_inc_beta",
]
