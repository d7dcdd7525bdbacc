"""Kernel backend selection.

The hot per-batch kernels exist twice: numba-JIT (``kernels_numba``) and
pure numpy (``kernels_numpy``).  The ``CYCTRAIN_BACKEND`` environment
variable picks one at import time:

* unset or ``auto`` -- numba when it imports, numpy otherwise;
* ``numba``         -- require the JIT kernels, fail if numba is missing;
* ``numpy``         -- force the pure-numpy path.

Both backends produce the same results to within last-ulp rounding of
reductions; each is individually bit-deterministic run to run.
"""

import os

ENV_VAR = "CYCTRAIN_BACKEND"
_CHOICES = ("auto", "numba", "numpy")


def load_kernels(choice=None):
    """Return ``(kernel_module, backend_name)`` for the given choice."""
    if choice is None:
        choice = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if choice not in _CHOICES:
        raise ValueError(f"{ENV_VAR} must be one of {_CHOICES}, got {choice!r}")
    if choice != "numpy":
        try:
            from . import kernels_numba
            return kernels_numba, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import kernels_numpy
    return kernels_numpy, "numpy"


kernels, active_backend = load_kernels()
