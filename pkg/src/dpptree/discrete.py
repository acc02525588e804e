"""Exact finite determinantal point processes over explicit site lists.

A kernel here is a Hermitian matrix indexed by sites (integer coordinate
tuples with their natural lexicographic order).  Inclusion probabilities
are section determinants,

    P(all of P occupied) = det [K]_P,

the full law on subsets follows by inclusion-exclusion over sections, and
exact samples come from sequential conditioning with Schur-complement
updates, certified against the brute-force law.  Subset masks use bit j
for the j-th site in kernel order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .backend import sample_occupancy
from .errors import DistributionError, SpectrumError, ValidationError

__all__ = [
    "Site",
    "lattice_sites",
    "DiscreteKernel",
    "SubsetDistribution",
    "inclusion_prob",
    "exact_distribution",
    "sample_exact",
    "sample_batch",
    "empirical_correlation",
    "empirical_subset_distribution",
    "tv_distance",
    "kernel_to_csv",
    "kernel_from_csv",
    "samples_to_ndjson",
    "samples_from_ndjson",
]

Site = tuple[int, ...]

_CLAMP = 1e-12
_SPEC_TOL = 1e-8


def lattice_sites(n: int) -> tuple[Site, ...]:
    """The first n one-dimensional lattice sites (0,), ..., (n-1,)."""
    return tuple((i,) for i in range(n))


@dataclass(frozen=True, eq=False)
class DiscreteKernel:
    """Hermitian kernel matrix over a strictly increasing site list."""

    sites: tuple[Site, ...]
    matrix: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        sites = tuple(tuple(int(c) for c in s) for s in self.sites)
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] != len(sites):
            raise ValidationError("matrix must be square and match the site list")
        if any(a >= b for a, b in zip(sites, sites[1:])):
            raise ValidationError("sites must be strictly increasing")
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > 1e-8:
            raise ValidationError("matrix is not Hermitian within 1e-8")
        mat = 0.5 * (mat + mat.conj().T)
        mat.setflags(write=False)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return len(self.sites)

    def index(self, site: Site) -> int:
        try:
            return self.sites.index(tuple(site))
        except ValueError as exc:
            raise ValidationError(f"site {site} not in kernel") from exc

    def section(self, subset) -> np.ndarray:
        idx = self._indices(subset)
        return self.matrix[np.ix_(idx, idx)]

    def _indices(self, subset) -> list[int]:
        idx = [s if isinstance(s, (int, np.integer)) else self.index(s) for s in subset]
        if len(set(idx)) != len(idx):
            raise ValidationError("subset contains repeated sites")
        return [int(i) for i in idx]

    def validate_spectrum(self, lo_tol: float = _SPEC_TOL, hi_tol: float = _SPEC_TOL) -> np.ndarray:
        """Eigenvalues, or SpectrumError naming the offending one."""
        eig = np.linalg.eigvalsh(self.matrix)
        if eig[0] < -lo_tol:
            raise SpectrumError(f"eigenvalue {eig[0]:.3e} below -{lo_tol:.1e}", eigenvalue=eig[0])
        if eig[-1] > 1.0 + hi_tol:
            raise SpectrumError(f"eigenvalue {eig[-1]:.6f} above 1+{hi_tol:.1e}", eigenvalue=eig[-1])
        return eig


@dataclass(frozen=True, eq=False)
class SubsetDistribution:
    """Exact law of a DPP over all 2^n subsets of its sites.

    probs[mask] is the probability of exactly the subset whose bits are
    set in mask (bit j = j-th site).
    """

    sites: tuple[Site, ...]
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        n = len(self.sites)
        if p.shape != (1 << n,):
            raise ValidationError("probs must have length 2^n")
        if p.min() < -1e-12:
            raise DistributionError(f"negative subset mass {p.min():.3e}")
        if abs(p.sum() - 1.0) > 1e-9:
            raise DistributionError(f"total mass {p.sum()} != 1")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n(self) -> int:
        return len(self.sites)

    def marginal(self, j: int) -> float:
        masks = np.arange(1 << self.n)
        return float(self.probs[(masks >> j) & 1 == 1].sum())


def inclusion_prob(kernel: DiscreteKernel, subset) -> float:
    """det of the subset section, clamped to 0 when within -1e-12."""
    idx = kernel._indices(subset)
    if not idx:
        return 1.0
    det = np.linalg.det(kernel.section(idx))
    val = float(det.real)
    if abs(det.imag) > 1e-9:
        raise ValidationError(f"section determinant has imaginary part {det.imag:.3e}")
    if -_CLAMP <= val < 0.0:
        val = 0.0
    return val


def _section_dets(matrix: np.ndarray) -> np.ndarray:
    """det [K]_T for every subset mask T, batched by subset size."""
    n = matrix.shape[0]
    masks = np.arange(1 << n)
    dets = np.empty(1 << n, dtype=complex)
    dets[0] = 1.0
    sizes = np.array([int(m).bit_count() for m in masks])
    for size in range(1, n + 1):
        ms = masks[sizes == size]
        idx = np.array([[j for j in range(n) if (m >> j) & 1] for m in ms])
        stacked = matrix[idx[:, :, None], idx[:, None, :]]
        dets[ms] = np.linalg.det(stacked)
    return dets


def exact_distribution(kernel: DiscreteKernel) -> SubsetDistribution:
    """Brute-force law: P(S) = sum_{T >= S} (-1)^{|T - S|} det [K]_T.

    Requires n <= 16.  Mass below -1e-9 signals a kernel whose spectrum
    leaves [0, 1] and raises.
    """
    n = kernel.n
    if n > 16:
        raise ValidationError(f"exact distribution limited to n <= 16, got {n}")
    vals = _section_dets(kernel.matrix)
    if np.max(np.abs(vals.imag)) > 1e-9:
        raise ValidationError("section determinants are not real")
    h = vals.real.copy()
    # superset Moebius transform, one bit at a time
    for b in range(n):
        v = h.reshape(-1, 2, 1 << b)
        v[:, 0, :] -= v[:, 1, :]
    if h.min() < -1e-9:
        raise DistributionError(
            f"inclusion-exclusion produced mass {h.min():.3e}; spectrum outside [0, 1]?"
        )
    h = np.clip(h, 0.0, None)
    return SubsetDistribution(kernel.sites, h)


def _sampling_matrix(kernel: DiscreteKernel) -> np.ndarray:
    if np.max(np.abs(kernel.matrix.imag), initial=0.0) < 1e-13:
        return np.ascontiguousarray(kernel.matrix.real)
    return np.ascontiguousarray(kernel.matrix)


def sample_batch(
    kernel: DiscreteKernel,
    n_samples: int,
    seed: int,
    backend: str | None = None,
    check_spectrum: bool = True,
) -> np.ndarray:
    """Boolean occupancy matrix of exact draws, reproducible from the seed.

    The uniforms are drawn once from numpy's seeded generator, so the
    result is identical across backends.
    """
    if check_spectrum:
        kernel.validate_spectrum()
    uniforms = np.random.default_rng(seed).random((n_samples, kernel.n))
    return sample_occupancy(_sampling_matrix(kernel), uniforms, backend=backend)


def sample_exact(kernel: DiscreteKernel, seed: int, backend: str | None = None) -> tuple[Site, ...]:
    """One exact configuration, as the tuple of occupied sites."""
    occ = sample_batch(kernel, 1, seed, backend=backend)[0]
    return tuple(kernel.sites[j] for j in np.flatnonzero(occ))


def empirical_subset_distribution(occupancy: np.ndarray) -> np.ndarray:
    """Frequencies over subset masks from an occupancy matrix (n <= 16)."""
    n = occupancy.shape[1]
    if n > 16:
        raise ValidationError("empirical subset distribution limited to n <= 16")
    masks = occupancy.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))
    return np.bincount(masks, minlength=1 << n) / occupancy.shape[0]


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return float(0.5 * np.abs(np.asarray(p) - np.asarray(q)).sum())


def empirical_correlation(occupancy: np.ndarray, indices) -> tuple[float, float]:
    """Fraction of samples containing every listed site, with standard error."""
    occupancy = np.asarray(occupancy, dtype=bool)
    if occupancy.shape[0] < 1:
        raise ValidationError("need at least one sample")
    idx = list(indices)
    hits = occupancy[:, idx].all(axis=1) if idx else np.ones(occupancy.shape[0], dtype=bool)
    m = occupancy.shape[0]
    p = float(hits.mean())
    stderr = float(np.sqrt(p * (1.0 - p) / m))
    return p, stderr


# ---------------------------------------------------------------------------
# interchange formats
# ---------------------------------------------------------------------------


def kernel_to_csv(kernel: DiscreteKernel, header_lines: list[str] | None = None) -> str:
    """CSV with rows (row, col, re, im); sites recorded as comments."""
    lines = [f"# {h}" for h in header_lines or []]
    for i, s in enumerate(kernel.sites):
        lines.append("# site," + ",".join(str(c) for c in (i, *s)))
    lines.append("row,col,re,im")
    for i in range(kernel.n):
        for j in range(kernel.n):
            v = kernel.matrix[i, j]
            lines.append(f"{i},{j},{v.real!r},{v.imag!r}")
    return "\n".join(lines) + "\n"


def kernel_from_csv(text: str) -> DiscreteKernel:
    sites: dict[int, Site] = {}
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("site,"):
                parts = body.split(",")[1:]
                sites[int(parts[0])] = tuple(int(c) for c in parts[1:])
            continue
        if line.startswith("row,"):
            continue
        i, j, re, im = line.split(",")
        entries.append((int(i), int(j), float(re), float(im)))
    if not entries:
        raise ValidationError("no kernel entries in CSV")
    n = max(max(i, j) for i, j, _, _ in entries) + 1
    mat = np.zeros((n, n), dtype=complex)
    for i, j, re, im in entries:
        mat[i, j] = re + 1j * im
    site_list = tuple(sites.get(i, (i,)) for i in range(n))
    return DiscreteKernel(site_list, mat)


def samples_to_ndjson(occupancy: np.ndarray, sites: tuple[Site, ...]) -> str:
    """One JSON array of occupied-site coordinate lists per line."""
    lines = []
    for row in np.asarray(occupancy, dtype=bool):
        lines.append(json.dumps([list(sites[j]) for j in np.flatnonzero(row)]))
    return "\n".join(lines) + "\n"


def samples_from_ndjson(text: str, sites: tuple[Site, ...]) -> np.ndarray:
    pos = {s: j for j, s in enumerate(sites)}
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        occ = np.zeros(len(sites), dtype=bool)
        for coords in json.loads(line):
            occ[pos[tuple(coords)]] = True
        rows.append(occ)
    return np.array(rows, dtype=bool)
