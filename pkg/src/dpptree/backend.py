"""Sampler backend selection.

The environment variable DPPTREE_BACKEND picks the hot-loop implementation:

    auto   (default) numba when importable, else numpy
    numba  require the jitted path
    numpy  force the pure-numpy fallback

Both paths are exact and produce identical samples from identical uniform
draws; see benchmarks/bench_sampler.py for the speed comparison.
"""

import os

from . import _sampler_impl
from .errors import ValidationError

ENV_VAR = "DPPTREE_BACKEND"


def resolve_backend(name: str | None = None) -> str:
    choice = (name or os.environ.get(ENV_VAR, "auto")).lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValidationError(f"unknown backend {choice!r}; use auto, numba, or numpy")
    if choice == "auto":
        return "numba" if _sampler_impl.HAVE_NUMBA else "numpy"
    if choice == "numba" and not _sampler_impl.HAVE_NUMBA:
        raise ValidationError("numba backend requested but numba is not importable")
    return choice


def sample_occupancy(kernel, uniforms, backend: str | None = None):
    """Dispatch the batch sampler; returns a boolean (samples, sites) matrix."""
    if resolve_backend(backend) == "numba":
        return _sampler_impl.sample_batch_numba(kernel, uniforms)
    return _sampler_impl.sample_batch_numpy(kernel, uniforms)
