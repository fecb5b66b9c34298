"""Backend selection for the hot kernels.

The compiled extension is used when it was built and ``POLARKIT_PURE`` is
unset; otherwise the numpy implementations are loaded.
"""

import os

from . import _fallback

if os.environ.get("POLARKIT_PURE", "") not in ("", "0"):
    _core = None
else:
    try:
        from . import _core
    except ImportError:
        _core = None

if _core is not None:
    BACKEND = "compiled"
    unrecoverable_weight_counts = _core.unrecoverable_weight_counts
    sc_decode_batch = _core.sc_decode_batch
else:
    BACKEND = "python"
    unrecoverable_weight_counts = _fallback.unrecoverable_weight_counts
    sc_decode_batch = _fallback.sc_decode_batch

BACKENDS = {"python": _fallback}
if _core is not None:
    BACKENDS["compiled"] = _core
