"""Hot loops, with a compiled Cython build preferred over the numpy fallback.

Set ``OPTOENT_PURE_PYTHON=1`` to force the fallback at import time.
"""
import os

from . import _rk4_py

BACKEND = "python"
rk4_covariance = _rk4_py.rk4_covariance

if os.environ.get("OPTOENT_PURE_PYTHON") != "1":
    try:
        from ._rk4 import rk4_covariance  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "cython"

__all__ = ["BACKEND", "rk4_covariance"]
