"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set MEDOE_PURE_PYTHON=1 to force the numpy backend.
"""

import os

from medoe._kernels import pure

if os.environ.get("MEDOE_PURE_PYTHON") == "1":
    _impl = pure
    USING_COMPILED = False
else:
    try:
        from medoe._kernels import _core as _impl

        USING_COMPILED = True
    except ImportError:
        _impl = pure
        USING_COMPILED = False

sample_categorical_rows = _impl.sample_categorical_rows
chainball_step_batch = _impl.chainball_step_batch
lambda_returns = _impl.lambda_returns
