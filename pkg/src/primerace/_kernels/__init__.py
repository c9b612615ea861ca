"""Kernel backend selection.

Imports the compiled segment-marking kernel when the extension was built,
otherwise the numpy fallback. Set PRIMERACE_PURE=1 to force the fallback
(used by the benchmark and the backend-equivalence tests).
"""
import os

if os.environ.get("PRIMERACE_PURE"):
    from . import pure as _impl
else:
    try:
        from . import _sieve_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _impl

mark_odd_flags = _impl.mark_odd_flags
BACKEND = _impl.BACKEND_NAME


def load_backend(name: str):
    """Explicitly load one backend ("pure" or "compiled"); for benchmarks."""
    if name == "pure":
        from . import pure

        return pure
    if name == "compiled":
        from . import _sieve_cy  # type: ignore[attr-defined]

        return _sieve_cy
    raise ValueError(f"unknown backend {name!r}")
