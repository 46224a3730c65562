"""Pure-Python exact squared Euclidean distance transform.

Two passes of the 1-D lower-envelope-of-parabolas transform
(Felzenszwalb & Huttenlocher), columns then rows.  Used as the fallback
when the compiled kernel is unavailable.
"""

from __future__ import annotations

import numpy as np

_INF = 1e300


def _dt1d(f: np.ndarray) -> np.ndarray:
    n = len(f)
    d = np.empty(n, dtype=np.float64)
    v = np.zeros(n, dtype=np.intp)
    z = np.empty(n + 1, dtype=np.float64)
    k = 0
    z[0], z[1] = -_INF, _INF
    for q in range(1, n):
        while True:
            p = v[k]
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p)
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = _INF
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        d[q] = (q - p) * (q - p) + f[p]
    return d


def squared_edt(targets: np.ndarray) -> np.ndarray:
    """Squared distance (in cell units) to the nearest True cell."""
    targets = np.asarray(targets, dtype=bool)
    f = np.where(targets, 0.0, _INF)
    for col in range(f.shape[1]):
        f[:, col] = _dt1d(f[:, col])
    for row in range(f.shape[0]):
        f[row, :] = _dt1d(f[row, :])
    return f
