"""Hot-loop kernels for the Gibbs sweep.

Two interchangeable backends implement the same sweep contract:

* ``_csweep`` -- Cython extension, built at install time;
* ``_pysweep`` -- pure NumPy fallback, always available.

Both consume the random stream identically (same draws, same order, same
distribution routines), so a fixed seed produces bit-identical chains on
either backend; ``tests/test_kernels.py`` pins that equivalence.  Selection
happens at import: the compiled module wins when present, and the
``LBDE_BACKEND`` environment variable (``compiled`` or ``python``) overrides.
"""
from __future__ import annotations

import os

from ..errors import ConfigurationError
from . import _pysweep

try:
    from . import _csweep
except ImportError:  # extension not built; NumPy fallback only
    _csweep = None

_ENV_CHOICE = os.environ.get("LBDE_BACKEND", "").strip().lower()


def available_backends() -> tuple:
    names = ["python"]
    if _csweep is not None:
        names.insert(0, "compiled")
    return tuple(names)


def default_backend() -> str:
    if _ENV_CHOICE:
        return _ENV_CHOICE
    return "compiled" if _csweep is not None else "python"


def get_backend(name: str = "auto"):
    """Kernel module for ``name`` ('auto', 'compiled', or 'python')."""
    if name in (None, "", "auto"):
        name = default_backend()
    if name in ("python", "numpy"):
        return _pysweep
    if name == "compiled":
        if _csweep is None:
            raise ConfigurationError("compiled kernel backend is not built")
        return _csweep
    raise ConfigurationError(f"unknown kernel backend {name!r}")
