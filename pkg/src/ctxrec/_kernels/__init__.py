"""Hot numeric kernels: compiled extension with a pure-numpy fallback.

The compiled module (``ctxrec._kernels._fast``, built from ``_fast.pyx``)
is preferred when importable.  Selection happens once at import time and
can be forced through the ``CTXREC_KERNELS`` environment variable:

* ``auto`` (default) - use the extension if available, else the fallback
* ``fast``           - require the extension, raise if missing
* ``pure``           - always use the numpy fallback

Both backends implement identical signatures and tie-breaking rules;
``tests/test_kernels.py`` cross-checks them and ``benchmarks/bench_kernels.py``
compares their speed.
"""

import os

from . import pure

_choice = os.environ.get("CTXREC_KERNELS", "auto").lower()

if _choice == "pure":
    _impl = pure
elif _choice in ("auto", "fast"):
    try:
        from . import _fast as _impl
    except ImportError:
        if _choice == "fast":
            raise
        _impl = pure
else:
    raise ValueError(f"CTXREC_KERNELS must be auto, fast or pure, got {_choice!r}")

BACKEND = "pure" if _impl is pure else "fast"

lasso_cd = _impl.lasso_cd
best_split = _impl.best_split
stump_scan = _impl.stump_scan

__all__ = ["BACKEND", "lasso_cd", "best_split", "stump_scan", "pure"]
