"""Distance-transform kernel selection.

Prefers the compiled Cython kernel and falls back to the pure-Python
one; set LUSA_EDT=python to force the fallback (the benchmark uses
this to compare both).
"""

from __future__ import annotations

import os

from . import _edt_py


def _select():
    if os.environ.get("LUSA_EDT", "").lower() == "python":
        return _edt_py.squared_edt, "python"
    try:
        from . import _edt_cy
    except ImportError:
        return _edt_py.squared_edt, "python"
    return _edt_cy.squared_edt, "cython"


squared_edt, BACKEND = _select()
