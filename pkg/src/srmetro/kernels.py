"""Backend selection for the pulse-sequence kernel.

The compiled extension is used when it imports; setting the environment
variable ``SRMETRO_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("SRMETRO_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_impls = {"python": _kernels_py.apply_sequence}
if _compiled is not None:
    _impls["cython"] = _compiled.apply_sequence


def available_backends():
    return sorted(_impls)


def apply_sequence(amp_b, amp_a, x, areas, ks, phases, backend=None):
    """Apply ``len(ks)`` pulses to every row of ``(amp_b, amp_a)`` in place.

    ``amp_b``/``amp_a`` must be C-contiguous complex128 of shape
    ``(rows, atoms)``; ``x`` broadcasts to that shape; ``areas`` and
    ``phases`` broadcast to ``(rows, pulses)``.
    """
    impl = _impls[backend or BACKEND]
    rows, atoms = amp_b.shape
    ks = np.ascontiguousarray(ks, dtype=np.float64)
    x = np.broadcast_to(np.asarray(x, dtype=np.float64), (rows, atoms))
    areas = np.broadcast_to(np.asarray(areas, dtype=np.float64), (rows, ks.size))
    phases = np.broadcast_to(np.asarray(phases, dtype=np.float64), (rows, ks.size))
    impl(amp_b, amp_a, x, areas, ks, phases)
