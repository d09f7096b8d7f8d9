"""Selects the SC kernel implementation at import time.

Preference order: the compiled extension, then the pure-numpy fallback.
Set POLARFLIP_BACKEND=python or =cython to force one explicitly.
"""

from __future__ import annotations

import os

_forced = os.environ.get("POLARFLIP_BACKEND", "auto").strip().lower()

if _forced in ("auto", ""):
    try:
        from . import _sc_cy as impl

        name = "cython"
    except ImportError:
        from . import _sc_py as impl

        name = "python"
elif _forced == "cython":
    from . import _sc_cy as impl

    name = "cython"
elif _forced == "python":
    from . import _sc_py as impl

    name = "python"
else:
    raise ImportError(f"POLARFLIP_BACKEND={_forced!r} (expected auto, cython or python)")
