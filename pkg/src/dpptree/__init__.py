"""dpptree: translation-invariant determinantal point processes on finite windows.

Spectral densities and their tent-window smoothings, the induced kernels,
tree representations over the lattice, exact finite DPP samplers with
brute-force oracles, stochastic-order and mixing diagnostics, and a
reproducible experiment CLI.
"""

__version__ = "0.1.0"

from .densities import (
    BoxDensity,
    GridDensity,
    TentWindow,
    bound_densities,
    density_from_json,
    density_to_jsonable,
    smooth_density,
    tent_eval,
    tent_ft_eval,
)
from .kernels import (
    KernelSpec,
    kernel_eval,
    kernel_eval_checked,
    kernel_gap_bound,
    kernel_table,
    smoothed_kernel_identity_check,
)

__all__ = [
    "__version__",
    "BoxDensity",
    "GridDensity",
    "TentWindow",
    "bound_densities",
    "density_from_json",
    "density_to_jsonable",
    "smooth_density",
    "tent_eval",
    "tent_ft_eval",
    "KernelSpec",
    "kernel_eval",
    "kernel_eval_checked",
    "kernel_gap_bound",
    "kernel_table",
    "smoothed_kernel_identity_check",
]
