"""Plan-grid kernel, compiled when available.

The Cython extension and the numpy fallback implement the same contract;
the extension is picked at import unless CRITNAV_PURE_PYTHON is set.
Within one backend results are bitwise deterministic; across backends
they agree to float rounding (summation order differs).
"""

import os

if os.environ.get("CRITNAV_PURE_PYTHON"):
    from ._plan_py import plan_grids

    BACKEND = "python"
else:
    try:
        from ._plan_c import plan_grids

        BACKEND = "cython"
    except ImportError:
        from ._plan_py import plan_grids

        BACKEND = "python"

__all__ = ["plan_grids", "BACKEND"]
