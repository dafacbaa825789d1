"""Select the compiled core when it imports, else the pure-Python kernels.

Set ``CP_DYNAMICS_PUREPY=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _purepy

NAME = "purepy"
_impl = _purepy

if os.environ.get("CP_DYNAMICS_PUREPY", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        NAME = "cython"
    except ImportError:  # pragma: no cover - depends on build environment
        _impl = _purepy

si_ci = _impl.si_ci
aux_fg = _impl.aux_fg
si_ci_series = _impl.si_ci_series
fg_continued_fraction = _impl.fg_continued_fraction
cavity_block = _impl.cavity_block

__all__ = ["NAME", "si_ci", "aux_fg", "si_ci_series", "fg_continued_fraction", "cavity_block"]
