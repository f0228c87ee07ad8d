"""Optional numba acceleration for the quadratic-form kernels.

The only hot spot in the package is the pairwise phase sum

    S(k) = sum_{i,j} f_i f_j exp(i k |x_i - x_j|)

behind the free-kernel quadratic forms: O(N^2) work with N in the tens of
thousands, too large to hold as a dense N x N matrix. Two implementations
are provided, a numba ``@njit(parallel=True)`` double loop and a chunked
pure-numpy fallback that never materializes more than ``chunk * N``
entries at once.

Selection happens at import time through the environment variable
``TWISTRES_NUMBA``:

* unset or ``auto`` -- use numba when it imports, fall back silently;
* ``0`` / ``off`` -- force the numpy path;
* ``1`` / ``on``  -- require numba, raise if it is missing.

``backend()`` reports which path is active; ``benchmarks/bench_kernels.py``
times the two against each other.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("TWISTRES_NUMBA", "auto").strip().lower()
_OFF = ("0", "off", "false", "no")
_ON = ("1", "on", "true", "yes", "force")


def _load_numba():
    if _FLAG in _OFF:
        return None
    try:
        import numba
    except ImportError:
        if _FLAG in _ON:
            raise
        return None
    return numba


_numba = _load_numba()

if _numba is not None:

    @_numba.njit(cache=True, parallel=True)
    def _phase_pairwise_jit(x, f, k):  # pragma: no cover - compiled
        n = x.shape[0]
        acc = 0.0 + 0.0j
        for i in _numba.prange(n):
            xi = x[i]
            row = 0.0 + 0.0j
            for j in range(n):
                row += f[j] * np.exp(1j * k * abs(xi - x[j]))
            acc += f[i] * row
        return acc


def phase_pairwise_numpy(x, f, k, chunk=2048):
    """Chunked evaluation of the pairwise phase sum without a full kernel.

    Parameters
    ----------
    x : (N,) real array of nodes.
    f : (N,) complex array, typically quadrature weights times a vector.
    k : complex wavenumber.
    chunk : rows processed per block.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=complex)
    k = complex(k)
    acc = 0.0 + 0.0j
    for start in range(0, x.size, chunk):
        stop = min(start + chunk, x.size)
        d = np.abs(x[start:stop, None] - x[None, :])
        acc += np.einsum("i,ij,j->", f[start:stop], np.exp(1j * k * d), f)
    return acc


def phase_pairwise(x, f, k):
    """Return sum_{i,j} f_i f_j e^{ik|x_i - x_j|} (bilinear, no conjugation)."""
    if _numba is not None:
        return _phase_pairwise_jit(
            np.ascontiguousarray(x, dtype=float),
            np.ascontiguousarray(f, dtype=complex),
            complex(k),
        )
    return phase_pairwise_numpy(x, f, k)


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numpy" if _numba is None else "numba"
