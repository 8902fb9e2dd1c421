"""Backend dispatch for the hot kernels.

The default backend is numba (JIT-compiled, cached). Set PWSPD_BACKEND=numpy
to force the pure-numpy fallback; if numba is not importable the fallback is
selected automatically with a warning. Both backends expose the same
functions with identical tie-breaking, so results agree to the bit on the
same inputs.
"""
import logging
import os

log = logging.getLogger("pwspd")

_BACKENDS = {}


def load_backend(name):
    """Import and memoize a backend module by name ('numba' or 'numpy')."""
    if name in _BACKENDS:
        return _BACKENDS[name]
    if name == "numba":
        from . import _engine_numba as mod
    elif name == "numpy":
        from . import _engine_numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    _BACKENDS[name] = mod
    return mod


def _resolve_default():
    want = os.environ.get("PWSPD_BACKEND", "numba").strip().lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"PWSPD_BACKEND must be 'numba' or 'numpy', got {want!r}")
    if want == "numba":
        try:
            return load_backend("numba"), "numba"
        except ImportError:
            log.warning("numba unavailable; falling back to numpy backend")
            return load_backend("numpy"), "numpy"
    return load_backend("numpy"), "numpy"


_active, ACTIVE_NAME = _resolve_default()


def active():
    """Return the active backend module."""
    return _active


def set_threads(n):
    """Cap the numba thread pool. Kernels are serial, so this never changes
    results; the flag exists for interface compatibility."""
    if ACTIVE_NAME != "numba":
        return
    import numba

    try:
        limit = numba.config.NUMBA_NUM_THREADS
        numba.set_num_threads(max(1, min(int(n), limit)))
    except Exception:  # pragma: no cover - defensive, threading layer quirks
        pass
