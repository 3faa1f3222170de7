"""Backend selection for the heat-bath loop.

The compiled extension is used when it imports; setting
``HARDCORE_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("HARDCORE_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernels import run_coupled, run_updates

    BACKEND = "python"
else:
    try:
        from ._kernels import run_coupled, run_updates

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._pykernels import run_coupled, run_updates

        BACKEND = "python"

__all__ = ["BACKEND", "run_coupled", "run_updates"]
