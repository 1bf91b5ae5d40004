"""Exact diagonalization of short chains, used to validate the fermionic path.

Everything here works directly with spin operators in the full ``2^N``
product basis and evaluates the squeezing parameter from total-spin moments,
including the ``J_x J_y + J_y J_x`` term, so it shares no assumptions with
the free-fermion code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .model import ModelParams
from .squeezing import DEGENERACY_TOL, SqueezingValue

MAX_SITES = 12

_SX = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex) / 2)
_SY = sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex) / 2)
_SZ = sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex) / 2)


def site_operator(op: sp.spmatrix, j: int, N: int) -> sp.csr_matrix:
    """``op`` acting on site ``j`` (0-based, site 0 is the leftmost factor)."""
    left = sp.identity(2**j, format="csr")
    right = sp.identity(2 ** (N - j - 1), format="csr")
    return sp.kron(sp.kron(left, op), right, format="csr")


def total_spin(N: int) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    """Sparse ``J_x, J_y, J_z``."""
    return tuple(reduce(lambda a, b: a + b, (site_operator(o, j, N) for j in range(N)))
                 for o in (_SX, _SY, _SZ))


def _check(params: ModelParams):
    if params.N > MAX_SITES:
        raise ValueError(f"dense diagonalization is limited to N <= {MAX_SITES}")


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Dense real Hamiltonian with periodic boundaries."""
    _check(params)
    N, d, h = params.N, params.delta, params.h
    sx = [site_operator(_SX, j, N) for j in range(N)]
    sy = [site_operator(_SY, j, N) for j in range(N)]
    sz = [site_operator(_SZ, j, N) for j in range(N)]
    H = sp.csr_matrix((2**N, 2**N), dtype=complex)
    for j in range(N):
        k = (j + 1) % N
        H = H - (1 + d) * (sx[j] @ sx[k]) - (1 - d) * (sy[j] @ sy[k])
    H = H - h * reduce(lambda a, b: a + b, sz)
    H = H.toarray()
    if np.max(np.abs(H.imag)) > 1e-14:
        raise AssertionError("Hamiltonian has an imaginary part")
    return np.ascontiguousarray(H.real)


@dataclass(frozen=True)
class DenseSpectrum:
    energies: np.ndarray
    basis: np.ndarray


def diagonalize(params: ModelParams) -> DenseSpectrum:
    w, V = np.linalg.eigh(build_hamiltonian(params))
    return DenseSpectrum(w, V)


def gibbs_weights(energies: np.ndarray, T: float, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Normalized Boltzmann weights; ``T = 0`` mixes the ground manifold equally."""
    if not (T >= 0):
        raise ValueError("temperature must be >= 0")
    e = energies - energies[0]
    if T == 0:
        p = (e <= tol).astype(float)
    else:
        p = np.exp(-e / T)
    return p / p.sum()


@dataclass(frozen=True)
class SpinMoments:
    """Thermal expectations of total-spin components and their products."""

    jx: complex
    jy: complex
    jxx: complex
    jyy: complex
    jxy_sym: complex  # <J_x J_y + J_y J_x>

    def ssp(self, N: int) -> float:
        """Squeezing parameter from the in-plane second moments."""
        a = (self.jxx + self.jyy).real
        b = (self.jxx - self.jyy).real
        c = self.jxy_sym.real
        return 2.0 / N * (a - math.sqrt(b * b + c * c))


def spin_moments(spec: DenseSpectrum, N: int, T: float, cutoff: float = 1e-18) -> SpinMoments:
    """Moments ``sum_j p_j <v_j| O |v_j>`` over the Gibbs weights."""
    p = gibbs_weights(spec.energies, T)
    keep = p > cutoff * p.max()
    V = spec.basis[:, keep].astype(complex)
    p = p[keep] / p[keep].sum()
    Jx, Jy, _ = total_spin(N)
    X, Y = Jx @ V, Jy @ V

    def avg(a, b):
        return complex(np.sum(p * np.einsum("ij,ij->j", a.conj(), b)))

    return SpinMoments(
        jx=avg(V, X),
        jy=avg(V, Y),
        jxx=avg(X, X),
        jyy=avg(Y, Y),
        jxy_sym=avg(X, Y) + avg(Y, X),
    )


def thermal_ssp_ed(params: ModelParams, T: float, spectrum: DenseSpectrum | None = None) -> SqueezingValue:
    """Squeezing parameter of the exact Gibbs state by dense diagonalization."""
    _check(params)
    if spectrum is None:
        spectrum = diagonalize(params)
    return SqueezingValue.of(spin_moments(spectrum, params.N, T).ssp(params.N))


def pair_correlators(spec: DenseSpectrum, N: int, T: float):
    """``<S^p_1 S^p_{1+n}>`` for ``p = x, y`` and ``n = 0 .. N-1``."""
    p = gibbs_weights(spec.energies, T)
    keep = p > 1e-18 * p.max()
    V = spec.basis[:, keep].astype(complex)
    p = p[keep] / p[keep].sum()
    out = {}
    for name, op in (("x", _SX), ("y", _SY)):
        first = site_operator(op, 0, N) @ V
        vals = []
        for n in range(N):
            other = site_operator(op, n, N) @ V
            vals.append(complex(np.sum(p * np.einsum("ij,ij->j", first.conj(), other))))
        out[name] = np.array(vals)
    return out
