"""Panel Gauss-Legendre quadrature and sine/cosine-integral building blocks.

Everything here is plain numerics with no knowledge of densities or kernels.
The half-line integrals J_n are the pieces an asymptotic tail expansion needs:

    Jc_n(gamma, X) = int_X^inf cos(gamma x) / x^n dx
    Js_n(gamma, X) = int_X^inf sin(gamma x) / x^n dx       (n = 1, 2, 3)

expressed through Si/Ci and integration by parts.  Jc_1 diverges at gamma = 0;
callers must pair 1/x terms before reaching that limit.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import sici

_GAMMA_TINY = 1e-9


@lru_cache(maxsize=8)
def _leggauss(npts: int):
    x, w = leggauss(npts)
    return x, w


def panel_edges(lo: float, hi: float, max_width: float) -> np.ndarray:
    """Uniform panel edges over [lo, hi] with panels no wider than max_width."""
    if hi <= lo:
        return np.array([lo, lo])
    n = max(1, int(np.ceil((hi - lo) / max_width)))
    return np.linspace(lo, hi, n + 1)


def gl_nodes(edges: np.ndarray, npts: int = 16):
    """Flattened Gauss-Legendre nodes and weights for the given panel edges."""
    x, w = _leggauss(npts)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def gl_integrate(f, edges: np.ndarray, npts: int = 16):
    """Integrate a vectorized callable over the panels."""
    nodes, weights = gl_nodes(edges, npts)
    return np.sum(weights * f(nodes))


def split_edges(lo: float, hi: float, breakpoints, max_width: float) -> list[np.ndarray]:
    """Panel-edge arrays for [lo, hi] split at interior breakpoints (e.g. kinks)."""
    pts = sorted({float(lo), float(hi)} | {float(b) for b in breakpoints if lo < b < hi})
    return [panel_edges(a, b, max_width) for a, b in zip(pts[:-1], pts[1:])]


def halfline_trig(n: int, gamma: float, X: float):
    """(Jc_n, Js_n) over [X, inf) as defined in the module docstring.

    n must be 1, 2 or 3 and X > 0.  For |gamma| X below 1e-9 the n = 1 cosine
    integral raises; the n >= 2 values take their gamma -> 0 limits.
    """
    sign = 1.0 if gamma >= 0 else -1.0
    g = abs(gamma)
    if g * X < _GAMMA_TINY:
        if n == 1:
            raise ZeroDivisionError("Jc_1 diverges at gamma = 0; pair the 1/x terms")
        if n == 2:
            return 1.0 / X, 0.0
        return 1.0 / (2.0 * X * X), 0.0
    si, ci = sici(g * X)
    if n == 1:
        return -ci, sign * (np.pi / 2 - si)
    js2 = np.sin(g * X) / X - g * ci
    jc2 = np.cos(g * X) / X - g * (np.pi / 2 - si)
    if n == 2:
        return jc2, sign * js2
    jc3 = np.cos(g * X) / (2.0 * X * X) - 0.5 * g * js2
    js3 = np.sin(g * X) / (2.0 * X * X) + 0.5 * g * jc2
    return jc3, sign * js3
