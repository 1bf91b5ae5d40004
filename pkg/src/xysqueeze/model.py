"""Model parameters, momentum grids, dispersion and mode occupations.

The chain is

    H = -sum_n [(1+delta) S^x_n S^x_{n+1} + (1-delta) S^y_n S^y_{n+1}] - h sum_n S^z_n

with periodic boundaries.  After the Jordan-Wigner and Bogoliubov steps it
becomes ``sum_k Lambda_k (mu_k^dag mu_k - 1/2)`` on a grid of ``N`` momenta.

Two grids appear.  The *periodic* grid ``k = 2 pi m / N`` is the one used for
eigenstate labels.  The *antiperiodic* grid ``k = 2 pi (m + 1/2) / N`` hosts
the even-parity half of the spin Hilbert space; the thermal module combines
both to obtain the exact Gibbs state.  Grids are stored as integer
numerators ``p`` with ``k = pi p / N`` so that phases ``k r`` can be reduced
exactly modulo ``2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Union

import numpy as np

Sector = Literal["periodic", "antiperiodic"]

# tanh(x) == 1.0 in double precision for every x above this value
TANH_SATURATION = 19.1


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the transverse-field XY chain.

    Parameters
    ----------
    N : int
        Number of sites, at least 2.
    delta : float
        Anisotropy in (0, 1].
    h : float
        Transverse field, non-negative.
    """

    N: int
    delta: float
    h: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta!r}")
        if not (self.h >= 0.0) or not math.isfinite(self.h):
            raise ValueError(f"h must be finite and >= 0, got {self.h!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "h", float(self.h))

    @property
    def h_f(self) -> float:
        """Factorized field ``sqrt(1 - delta^2)``."""
        return math.sqrt(1.0 - self.delta**2)

    def with_h(self, h: float) -> "ModelParams":
        return ModelParams(self.N, self.delta, h)


@dataclass(frozen=True)
class MomentumGrid:
    """Sorted momentum grid ``k = pi * numerators / N``.

    Attributes
    ----------
    N : int
        Chain length.
    sector : {"periodic", "antiperiodic"}
        Periodic numerators are even, antiperiodic ones odd.
    numerators : ndarray of int
        Integers ``p`` with ``k = pi p / N``, ascending, in ``(-N, N]``.
    """

    N: int
    sector: Sector
    numerators: np.ndarray = field(repr=False)

    @property
    def ks(self) -> np.ndarray:
        return np.pi * self.numerators / self.N

    @property
    def unpaired(self) -> np.ndarray:
        """Mask of the self-conjugate momenta ``k = 0`` and ``k = pi``."""
        p = self.numerators
        return (p == 0) | (p == self.N)

    def index_of(self, k: float) -> int:
        """Grid index of the momentum closest to ``k`` (modulo 2 pi)."""
        d = np.angle(np.exp(1j * (self.ks - k)))
        return int(np.argmin(np.abs(d)))

    def __len__(self) -> int:
        return self.N


def build_grid(params: ModelParams | int, sector: Sector = "periodic") -> MomentumGrid:
    """Momentum grid with exactly ``N`` points.

    The periodic grid takes ``m = 0, +-1, ..., +-(N-1)/2`` for odd ``N`` and
    ``m = -(N/2 - 1), ..., N/2`` for even ``N``.  The antiperiodic grid takes
    the ``N`` half-integers ``m + 1/2`` in ``(-N/2, N/2]``.
    """
    N = params.N if isinstance(params, ModelParams) else int(params)
    if sector == "periodic":
        lo = -((N - 1) // 2)
        p = 2 * np.arange(lo, lo + N)
    elif sector == "antiperiodic":
        # odd numerators in (-N, N]
        top = N if N % 2 else N - 1
        p = np.arange(top - 2 * (N - 1), top + 1, 2)
    else:
        raise ValueError(f"unknown sector {sector!r}")
    return MomentumGrid(N, sector, p.astype(np.int64))


@dataclass(frozen=True)
class ModeData:
    """Bloch vector, dispersion and Bogoliubov angle of one or many modes.

    Fields are scalars or arrays with the shape of ``k``.  For ``lam == 0``
    the angle takes the sentinel ``cos2theta = 1, sin2theta = 0``.
    """

    k: np.ndarray
    d_y: np.ndarray
    d_z: np.ndarray
    d_0: float
    lam: np.ndarray
    cos2theta: np.ndarray
    sin2theta: np.ndarray

    @property
    def phase(self) -> np.ndarray:
        """The angle ``2 theta_k`` in (-pi, pi]."""
        return np.arctan2(self.sin2theta, self.cos2theta)

    def __len__(self) -> int:
        return int(np.size(self.k))


def _sin_exact(k):
    s = np.sin(k)
    # sin(pi) is 1.2e-16 in floating point; multiples of pi are exact zeros
    return np.where(np.abs(s) < 1e-14, 0.0, s)


def mode_data(params: ModelParams, k) -> ModeData:
    """Dispersion and Bogoliubov angles at momentum ``k`` (scalar or array)."""
    k = np.asarray(k, dtype=float)
    d_y = -params.delta * _sin_exact(k)
    d_z = -(np.cos(k) + params.h)
    lam = np.hypot(d_y, d_z)
    pos = lam > 0
    safe = np.where(pos, lam, 1.0)
    c2 = np.where(pos, d_z / safe, 1.0)
    s2 = np.where(pos, -d_y / safe, 0.0)
    return ModeData(k, d_y, d_z, params.h, lam, c2, s2)


def grid_modes(params: ModelParams, grid: MomentumGrid | None = None) -> ModeData:
    """Mode data over a whole grid, computed from exact integer momenta."""
    if grid is None:
        grid = build_grid(params)
    return mode_data(params, grid.ks)


def vacuum_parity(params: ModelParams, grid: MomentumGrid) -> int:
    """Fermion parity ``(-1)^{N_F}`` of the Bogoliubov vacuum on ``grid``.

    Paired momenta contribute an even number of fermions.  A self-conjugate
    momentum is filled in the vacuum when its single-particle energy
    ``-(cos k + h)`` is negative.
    """
    k = grid.ks[grid.unpaired]
    filled = int(np.sum(-(np.cos(k) + params.h) < 0))
    return -1 if filled % 2 else 1


# ---------------------------------------------------------------------------
# occupation profiles


@dataclass(frozen=True)
class Thermal:
    beta: float  # math.inf at zero temperature


@dataclass(frozen=True)
class Eigenstate:
    occupied: frozenset


@dataclass(frozen=True)
class Twisted:
    """Parity-twisted thermal weight ``coth(beta Lambda / 2)``.

    Appears only inside the parity projection of the Gibbs state.
    """

    beta: float


@dataclass(frozen=True)
class Custom:
    """Arbitrary caller-supplied weights in [-1, 1]."""


ProfileKind = Union[Thermal, Eigenstate, Twisted, Custom]


@dataclass(frozen=True)
class OccupationProfile:
    """Per-mode contraction weights ``f_k`` on a grid.

    Thermal profiles carry ``tanh(beta Lambda_k / 2)``, eigenstates
    ``1 - 2 n_k``.
    """

    f: np.ndarray
    kind: ProfileKind

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        f.setflags(write=False)
        object.__setattr__(self, "f", f)
        if isinstance(self.kind, Thermal):
            if np.any(f < 0) or np.any(f > 1):
                raise ValueError("thermal weights must lie in [0, 1]")
        elif isinstance(self.kind, (Eigenstate, Custom)):
            if np.any(np.abs(f) > 1):
                raise ValueError("weights must lie in [-1, 1]")

    def __len__(self) -> int:
        return len(self.f)


def _beta(T: float) -> float:
    if not (T >= 0):
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    return math.inf if T == 0 else 1.0 / T


def saturating_tanh(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(x > TANH_SATURATION, 1.0, np.tanh(np.minimum(x, TANH_SATURATION)))


def thermal_weights(lam: np.ndarray, beta: float) -> np.ndarray:
    """``tanh(beta lam / 2)``, with the zero-temperature limit taken exactly."""
    lam = np.asarray(lam, dtype=float)
    if math.isinf(beta):
        return np.where(lam > 0, 1.0, 0.0)
    return saturating_tanh(0.5 * beta * lam)


def occupation_profile_thermal(modes: ModeData, T: float) -> OccupationProfile:
    """Thermal profile ``f_k = tanh(Lambda_k / 2T)``; ``T = 0`` is exact."""
    beta = _beta(T)
    return OccupationProfile(thermal_weights(modes.lam, beta), Thermal(beta))


def occupation_profile_eigenstate(modes: ModeData, occupied: Iterable[int]) -> OccupationProfile:
    """Fock-state profile ``f_k = 1 - 2 n_k``.

    Zero modes (``Lambda_k = 0``) keep ``f_k = 0`` whatever their occupation.
    """
    occ = _check_occupied(occupied, len(modes))
    f = np.ones(len(modes))
    f[list(occ)] = -1.0
    f[np.asarray(modes.lam) == 0] = 0.0
    return OccupationProfile(f, Eigenstate(occ))


def _check_occupied(occupied: Iterable[int], n: int) -> frozenset:
    occ = frozenset(int(i) for i in occupied)
    bad = [i for i in occ if not 0 <= i < n]
    if bad:
        raise IndexError(f"mode indices out of range 0..{n - 1}: {sorted(bad)}")
    return occ


def state_energy(modes: ModeData, occupied: Iterable[int]) -> float:
    """Energy ``sum_k Lambda_k (n_k - 1/2)`` of a Bogoliubov Fock state."""
    occ = _check_occupied(occupied, len(modes))
    lam = np.asarray(modes.lam)
    return float(lam[list(occ)].sum() - 0.5 * lam.sum())


def mode_density_matrix(mode: ModeData, beta: float) -> np.ndarray:
    """Thermal density matrix of the ``(k, -k)`` pair in the 4-state basis.

    Basis order: ``|0 0>, c_k^dag c_-k^dag |0 0>, c_k^dag |0 0>,
    c_-k^dag |0 0>``.  The paired block holds
    ``cosh(bL) +- cos2theta sinh(bL)`` on the diagonal and
    ``-+ i sin2theta sinh(bL)`` off it; the single-occupied states have
    weight 1.  Everything is divided by ``2 (1 + cosh(bL))``.
    """
    if not (0 <= beta < math.inf):
        raise ValueError("beta must be finite and >= 0")
    x = beta * float(mode.lam)
    # divide numerator and denominator by cosh(x) to stay finite for large x
    t = math.tanh(x)
    sech = 1.0 / math.cosh(x) if x < 700 else 0.0
    theta = 2.0 * (1.0 + sech)
    c2, s2 = float(mode.cos2theta), float(mode.sin2theta)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 + c2 * t
    rho[1, 1] = 1.0 - c2 * t
    rho[0, 1] = -1j * s2 * t
    rho[1, 0] = 1j * s2 * t
    rho[2, 2] = rho[3, 3] = sech
    return rho / theta
