"""Select the kernel backend at import time.

The compiled Cython module is preferred when present; the pure-Python
twin is the fallback. Override with the environment variable
``UOLSIM_BACKEND`` set to ``compiled``, ``python``, or ``auto`` (default).
Setting ``compiled`` raises if the extension is missing instead of
silently degrading.
"""

import os

from . import _pykernels

_choice = os.environ.get("UOLSIM_BACKEND", "auto").lower()
if _choice not in ("auto", "compiled", "python"):
    raise ValueError("UOLSIM_BACKEND must be auto, compiled, or python")

_impl = _pykernels
if _choice in ("auto", "compiled"):
    try:
        from . import _kernels as _cmod

        _impl = _cmod
    except ImportError:
        if _choice == "compiled":
            raise


def backend_name():
    """Name of the active backend: 'compiled' or 'python'."""
    return _impl.BACKEND_NAME


def implementations():
    """All importable kernel modules, keyed by name (for tests/benchmarks)."""
    mods = {"python": _pykernels}
    try:
        from . import _kernels as cmod

        mods["compiled"] = cmod
    except ImportError:
        pass
    return mods


eval_flat = _impl.eval_flat
scan_consistent = _impl.scan_consistent
mismatch_counts = _impl.mismatch_counts
run_machine = _impl.run_machine
