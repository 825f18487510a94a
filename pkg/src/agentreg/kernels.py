"""Backend selection for the trial kernels.

The compiled extension is preferred; set ``AGENTREG_PURE_PYTHON=1`` to force
the fallback (the test-suite runs both and compares them).
"""

from __future__ import annotations

import os

from agentreg import _pykernels

LUCE = _pykernels.LUCE
CEILING = _pykernels.CEILING

python_backend = _pykernels

compiled_backend = None
if not os.environ.get("AGENTREG_PURE_PYTHON"):
    try:
        from agentreg import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND_NAME = "compiled" if compiled_backend is not None else "python"

run_cell = backend.run_cell
choose_slot = backend.choose_slot
uniforms = backend.uniforms
wilson_halfwidth = backend.wilson_halfwidth
