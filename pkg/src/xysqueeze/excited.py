"""Squeezing across fixed-quasiparticle-number subspaces of the excited spectrum.

A subspace with ``N_B`` Bogoliubov quasiparticles on the periodic grid has
``C(N, N_B)`` Fock states.  Each gets an energy above the vacuum and a
squeezing parameter from its ``f_k = 1 - 2 n_k`` profile.  The scan feeds two
normalized histograms: squeezed/unsqueezed state counts per energy bin and
per ``xi^2`` bin.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._kernels import string_sums_batch
from .correlators import kernel_basis
from .model import ModelParams, build_grid, grid_modes
from .squeezing import COHERENCE_TOL, ssp_from_sums

DEFAULT_CAP = 2_000_000
CHUNK = 2048


@dataclass(frozen=True)
class SqueezingRecord:
    occupied: tuple
    energy: float  # E - E_0
    xi2: float


@dataclass(frozen=True)
class SubspaceScan:
    """Per-state energies and squeezing parameters of one ``N_B`` subspace.

    Attributes
    ----------
    n_b : int
        Quasiparticle number.
    occupied : ndarray, shape (count, n_b)
        Occupied periodic-grid indices of each state, ascending per row.
    energy : ndarray
        ``E - E_0`` per state.
    xi2 : ndarray
        Squeezing parameter per state.
    total : int
        ``C(N, n_b)``, the subspace dimension.
    sampled : bool
        True when the states are a seeded uniform sample rather than the
        full subspace.
    """

    params: ModelParams
    n_b: int
    occupied: np.ndarray
    energy: np.ndarray
    xi2: np.ndarray
    total: int
    sampled: bool

    def __len__(self) -> int:
        return len(self.energy)

    @property
    def records(self) -> Iterator[SqueezingRecord]:
        for occ, e, x in zip(self.occupied, self.energy, self.xi2):
            yield SqueezingRecord(tuple(int(i) for i in occ), float(e), float(x))

    @property
    def squeezed(self) -> np.ndarray:
        """Mask of squeezed states; coherent states count as unsqueezed."""
        return is_squeezed(self.xi2)


def is_squeezed(xi2, tol: float = COHERENCE_TOL) -> np.ndarray:
    return np.asarray(xi2) < 1.0 - tol


def _sample_subsets(N: int, n_b: int, size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    seen = set()
    out = []
    while len(out) < size:
        occ = tuple(sorted(int(i) for i in rng.choice(N, n_b, replace=False)))
        if occ not in seen:
            seen.add(occ)
            out.append(occ)
    return np.array(out, dtype=np.int64).reshape(size, n_b)


def _lexicographic(N: int, n_b: int) -> np.ndarray:
    total = math.comb(N, n_b)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(N), n_b)),
        dtype=np.int64,
        count=total * n_b,
    )
    return flat.reshape(total, n_b)


class EigenstateEvaluator:
    """Batched squeezing parameters of periodic-grid Fock states."""

    def __init__(self, params: ModelParams):
        self.params = params
        grid = build_grid(params)
        self.modes = grid_modes(params, grid)
        self.lam = np.asarray(self.modes.lam)
        self.basis = kernel_basis(self.modes, grid)
        self.zero = self.lam == 0

    def energies(self, occupied: np.ndarray) -> np.ndarray:
        if occupied.shape[1] == 0:
            return np.zeros(len(occupied))
        return self.lam[occupied].sum(axis=1)

    def xi2(self, occupied: np.ndarray) -> np.ndarray:
        N = self.params.N
        F = np.ones((len(occupied), N))
        rows = np.repeat(np.arange(len(occupied)), occupied.shape[1])
        F[rows, occupied.ravel()] = -1.0
        F[:, self.zero] = 0.0
        Q = -(F @ self.basis.T) / N
        sx, sy = string_sums_batch(np.ascontiguousarray(Q), N - 1)
        return ssp_from_sums(0.25 * sx, 0.25 * sy)


def enumerate_subspace(
    params: ModelParams,
    n_b: int,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    workers: int = 1,
) -> SubspaceScan:
    """All states with ``n_b`` quasiparticles, or a seeded sample of ``cap``.

    Exhaustive scans list occupation sets in lexicographic order.  When
    ``C(N, n_b)`` exceeds ``cap``, ``cap`` distinct sets are drawn uniformly
    with ``numpy.random.default_rng(seed)`` and the scan is flagged as
    sampled.  Work is split into fixed chunks evaluated on ``workers``
    threads; results keep input order.
    """
    N = params.N
    if not 0 <= n_b <= N:
        raise ValueError(f"N_B must lie in 0..{N}, got {n_b}")
    if cap < 1:
        raise ValueError("cap must be positive")
    total = math.comb(N, n_b)
    sampled = total > cap
    occ = _sample_subsets(N, n_b, cap, seed) if sampled else _lexicographic(N, n_b)
    ev = EigenstateEvaluator(params)
    chunks = [occ[i : i + CHUNK] for i in range(0, len(occ), CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(ev.xi2, chunks))
    else:
        parts = [ev.xi2(c) for c in chunks]
    xi2 = np.concatenate(parts) if parts else np.zeros(0)
    return SubspaceScan(params, n_b, occ, ev.energies(occ), xi2, total, sampled)


# ---------------------------------------------------------------------------
# histograms


def _bin_index(values: np.ndarray, lo: float, hi: float, m: int) -> np.ndarray:
    """Equal-width bins on ``[lo, hi]``, half-open except the closed last bin."""
    if hi <= lo:
        return np.zeros(len(values), dtype=np.int64)
    idx = np.floor((values - lo) / (hi - lo) * m).astype(np.int64)
    return np.clip(idx, 0, m - 1)


@dataclass(frozen=True)
class DensityHistogram:
    """Fractions of squeezed and unsqueezed states per energy bin.

    ``edges`` has ``m' + 1`` entries spanning ``[E_min, E_max]`` of the scan
    (energies measured from the vacuum).  ``estimate`` marks sampled scans.
    """

    edges: np.ndarray
    dos_s: np.ndarray
    dos_n: np.ndarray
    estimate: bool


@dataclass(frozen=True)
class SqueezingDistribution:
    """Fractions of squeezed and unsqueezed states per ``xi^2`` bin."""

    edges: np.ndarray
    d_s: np.ndarray
    d_n: np.ndarray
    estimate: bool


def _split_counts(values, squeezed, m):
    lo, hi = float(values.min()), float(values.max())
    idx = _bin_index(values, lo, hi, m)
    n = len(values)
    s = np.bincount(idx[squeezed], minlength=m) / n
    u = np.bincount(idx[~squeezed], minlength=m) / n
    return np.linspace(lo, hi, m + 1), s, u


def density_histogram(scan: SubspaceScan, m_prime: int = 50) -> DensityHistogram:
    """Squeezed/unsqueezed state fractions over ``m'`` equal energy bins."""
    if len(scan) == 0:
        raise ValueError("empty scan")
    if m_prime < 1:
        raise ValueError("need at least one bin")
    edges, s, u = _split_counts(scan.energy, scan.squeezed, m_prime)
    return DensityHistogram(edges, s, u, scan.sampled)


def squeezing_distribution(scan: SubspaceScan, m_second: int = 5000) -> SqueezingDistribution:
    """Squeezed/unsqueezed state fractions over ``m''`` equal ``xi^2`` bins."""
    if len(scan) == 0:
        raise ValueError("empty scan")
    if m_second < 1:
        raise ValueError("need at least one bin")
    edges, s, u = _split_counts(scan.xi2, scan.squeezed, m_second)
    return SqueezingDistribution(edges, s, u, scan.sampled)
