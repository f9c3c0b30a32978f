"""Hot inner loops with a compiled core and a pure-Python fallback.

The Cython extension ``schematik.kernels._native`` is preferred; when it is
not importable (no compiler at install time) the module transparently falls
back to ``schematik.kernels._fallback``. ``BACKEND`` names the active one.
"""

from schematik.kernels import _fallback

try:
    from schematik.kernels import _native as _impl

    BACKEND = "native"
except ImportError:  # pragma: no cover - depends on build environment
    _impl = _fallback
    BACKEND = "python"

edit_costs = _impl.edit_costs
smooth_rows_inplace = _impl.smooth_rows_inplace


def backends():
    """Mapping of backend name to implementation module (for benchmarks and
    equivalence tests). Only available backends are listed."""
    out = {"python": _fallback}
    if BACKEND == "native":
        out["native"] = _impl
    return out
