"""Hot sampling kernels: sequential conditioning with Schur-complement updates.

Both implementations consume a pre-drawn uniform matrix, one row per sample
and one column per site, and visit sites in order.  At site i the occupancy
indicator is u < clip(K_ii, 0, 1); conditioning then replaces the trailing
block by its Schur complement with pivot K_ii (occupied) or K_ii - 1
(empty).  Pivots below 1e-12 in magnitude belong to forced branches whose
cross row/column vanishes for any admissible kernel, so the update is
skipped rather than divided.

Given identical inputs the numba and numpy paths return identical
occupancy matrices; the backend choice only trades speed.
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap

_PIVOT_TINY = 1e-12


@njit(cache=True)
def _sample_loop(kernel, uniforms, out):  # pragma: no cover - compiled
    n_samples, n = uniforms.shape
    work = np.empty_like(kernel)
    for s in range(n_samples):
        for a in range(n):
            for b in range(n):
                work[a, b] = kernel[a, b]
        for i in range(n):
            p = work[i, i].real
            if p < 0.0:
                p = 0.0
            elif p > 1.0:
                p = 1.0
            occupied = uniforms[s, i] < p
            out[s, i] = occupied
            pivot = work[i, i] if occupied else work[i, i] - 1.0
            if abs(pivot) < _PIVOT_TINY:
                continue
            for j in range(i + 1, n):
                c = work[j, i] / pivot
                for k in range(i + 1, n):
                    work[j, k] -= c * work[i, k]
    return out


def sample_batch_numba(kernel: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    out = np.zeros(uniforms.shape, dtype=np.bool_)
    _sample_loop(kernel, uniforms, out)
    return out


def sample_batch_numpy(kernel: np.ndarray, uniforms: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Vectorized across samples; chunked to bound the workspace size."""
    n_samples, n = uniforms.shape
    out = np.zeros((n_samples, n), dtype=np.bool_)
    for start in range(0, n_samples, chunk):
        u = uniforms[start : start + chunk]
        m = u.shape[0]
        work = np.repeat(kernel[None, :, :], m, axis=0)
        for i in range(n):
            p = np.clip(work[:, i, i].real, 0.0, 1.0)
            occupied = u[:, i] < p
            out[start : start + m, i] = occupied
            pivot = np.where(occupied, work[:, i, i], work[:, i, i] - 1.0)
            safe = np.abs(pivot) >= _PIVOT_TINY
            inv = np.where(safe, 1.0, 0.0) / np.where(safe, pivot, 1.0)
            col = work[:, i + 1 :, i] * inv[:, None]
            work[:, i + 1 :, i + 1 :] -= col[:, :, None] * work[:, None, i, i + 1 :]
    return out
