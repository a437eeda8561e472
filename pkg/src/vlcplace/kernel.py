"""Select the hot-kernel implementations: compiled extension if built, numpy
otherwise.

Three kernels live behind this switch: the CV(RMSE) spacing scan, the
dual-subgradient sweep loop, and the minimal-power fixed point. Set
VLCPLACE_PURE_PYTHON=1 to force the numpy fallbacks (used by the benchmark
and by tests that compare implementations).
"""

from __future__ import annotations

import os

from . import _kernel_py

_impl = _kernel_py
IMPLEMENTATION = "python"
if not os.environ.get("VLCPLACE_PURE_PYTHON"):
    try:
        from . import _kernel_c

        _impl = _kernel_c
        IMPLEMENTATION = "c"
    except ImportError:
        pass

cv_for_spacings = _impl.cv_for_spacings
dual_pass = _impl.dual_pass
power_fixed_point = _impl.power_fixed_point
