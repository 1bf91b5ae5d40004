"""Two-point string correlators of the spin chain from fermionic contractions.

With ``A_j = c_j^dag + c_j`` and ``B_j = c_j^dag - c_j`` the spin
correlators become Majorana strings

    G^xx_n = 1/4 <B_1 A_2 B_2 ... A_n B_n A_{n+1}>
    G^yy_n = (-1)^n / 4 <A_1 B_2 A_2 ... B_n A_n B_{n+1}>

whose Wick expansion is a Pfaffian.  For Gaussian states with
``<A A> = delta``, ``<B B> = -delta`` the Pfaffian collapses to the
Toeplitz determinants ``det[Q(j-i+1)]`` and ``det[Q(j-i-1)]``, where
``Q(r) = <B_l A_{l+r}>`` is the contraction kernel.  Both routes are
implemented; the determinant route is the fast one and the Pfaffian route
serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._kernels import leading_minors_qr
from .model import MomentumGrid, ModeData, OccupationProfile, build_grid

Method = Literal["qr", "lu"]


@dataclass(frozen=True)
class ContractionKernel:
    """``Q(r) = <B_l A_{l+r}>`` for offsets ``|r| <= N - 1``.

    ``values[r + N - 1]`` holds ``Q(r)``.
    """

    N: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2 * self.N - 1,):
            raise ValueError("kernel needs 2N-1 offsets")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def ba(self, r: int) -> float:
        """``<B_l A_{l+r}>``."""
        return float(self.values[r + self.N - 1])

    def ab(self, r: int) -> float:
        """``<A_l B_{l+r}>``, equal to ``-Q(-r)``."""
        return -float(self.values[-r + self.N - 1])


@dataclass(frozen=True)
class CorrelatorTable:
    """``G^xx_n`` and ``G^yy_n`` for ``n = 1 .. N-1``."""

    gxx: np.ndarray
    gyy: np.ndarray

    def __post_init__(self):
        for name in ("gxx", "gyy"):
            v = np.asarray(getattr(self, name), dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, name, v)


def kernel_basis(modes: ModeData, grid: MomentumGrid) -> np.ndarray:
    """Matrix ``C[r + N - 1, k] = cos(2 theta_k + k r)``.

    The kernel is ``Q = -(C @ f) / N``.  Phases ``k r`` are reduced modulo
    ``2 pi`` in integer arithmetic so that large offsets lose no accuracy.
    """
    N = grid.N
    r = np.arange(-(N - 1), N)
    kr = np.pi * (np.outer(r, grid.numerators) % (2 * N)) / N
    return np.cos(modes.phase[None, :] + kr)


def contraction_kernel(
    profile: OccupationProfile, modes: ModeData, grid: MomentumGrid | None = None
) -> ContractionKernel:
    """Contraction kernel ``Q(r) = -(1/N) sum_k f_k cos(2 theta_k + k r)``."""
    N = len(profile)
    if grid is None:
        grid = build_grid(N)
    if len(modes) != N or grid.N != N:
        raise ValueError("profile, modes and grid sizes differ")
    q = -(kernel_basis(modes, grid) @ profile.f) / N
    return ContractionKernel(N, q)


def toeplitz_matrices(kernel: ContractionKernel, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``T[i, j] = Q(j - i + 1)`` and ``T'[i, j] = Q(j - i - 1)``, size ``n``."""
    N = kernel.N
    idx = np.arange(n)
    off = idx[None, :] - idx[:, None] + N - 1
    q = kernel.values
    return q[off + 1], q[off - 1]


def _check_n(kernel: ContractionKernel, n: int):
    if not 1 <= n <= kernel.N - 1:
        raise ValueError(f"n must lie in 1..{kernel.N - 1}, got {n}")


def corr_xx(kernel: ContractionKernel, n: int) -> float:
    """``G^xx_n`` as a quarter of a pivoted-LU Toeplitz determinant."""
    _check_n(kernel, n)
    return 0.25 * float(np.linalg.det(toeplitz_matrices(kernel, n)[0]))


def corr_yy(kernel: ContractionKernel, n: int) -> float:
    """``G^yy_n`` as a quarter of a pivoted-LU Toeplitz determinant."""
    _check_n(kernel, n)
    return 0.25 * float(np.linalg.det(toeplitz_matrices(kernel, n)[1]))


def leading_minors(T: np.ndarray, method: Method = "qr") -> tuple[np.ndarray, np.ndarray]:
    """Signs and log-magnitudes of ``det T[:n, :n]`` for ``n = 1 .. len(T)``.

    ``"qr"`` grows one QR factorization order by order (O(n^3) for all
    minors); ``"lu"`` runs a partially pivoted LU for each order separately
    (O(n^4)).  Both are backward stable.
    """
    T = np.ascontiguousarray(T, dtype=float)
    if method == "qr":
        return leading_minors_qr(T)
    if method != "lu":
        raise ValueError(f"unknown method {method!r}")
    out = [np.linalg.slogdet(T[:n, :n]) for n in range(1, T.shape[0] + 1)]
    return np.array([o[0] for o in out]), np.array([o[1] for o in out])


def string_log_minors(kernel: ContractionKernel, method: Method = "qr"):
    """Log-domain determinants behind ``4 G^xx_n`` and ``4 G^yy_n``.

    Returns ``(sx, lx, sy, ly)`` with ``4 G^xx_n = sx * exp(lx)`` and
    likewise for ``yy``, ``n = 1 .. N-1``.
    """
    tx, ty = toeplitz_matrices(kernel, kernel.N - 1)
    sx, lx = leading_minors(tx, method)
    sy, ly = leading_minors(ty, method)
    return sx, lx, sy, ly


def table_from_kernel(kernel: ContractionKernel, method: Method = "qr") -> CorrelatorTable:
    sx, lx, sy, ly = string_log_minors(kernel, method)
    return CorrelatorTable(0.25 * sx * np.exp(lx), 0.25 * sy * np.exp(ly))


def correlator_table(
    profile: OccupationProfile,
    modes: ModeData,
    grid: MomentumGrid | None = None,
    method: Method = "qr",
) -> CorrelatorTable:
    """Full table of ``G^xx_n``, ``G^yy_n`` for a Gaussian profile."""
    return table_from_kernel(contraction_kernel(profile, modes, grid), method)


# ---------------------------------------------------------------------------
# generic Pfaffian route


def pfaffian(M: np.ndarray, tol: float = 1e-12) -> float:
    """Pfaffian of a real antisymmetric matrix.

    Skew-symmetric Gaussian elimination (Parlett-Reid) with pivoting on the
    largest entry of each column, O(m^3).
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("Pfaffian needs a square matrix")
    n = A.shape[0]
    if n % 2:
        raise ValueError("Pfaffian needs an even dimension")
    scale = max(np.max(np.abs(A)), 1.0) if n else 1.0
    if n and np.max(np.abs(A + A.T)) > tol * scale:
        raise ValueError("matrix is not antisymmetric")
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2 :] / A[k, k + 1]
            col = A[k + 2 :, k + 1].copy()
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def _contraction(kernel: ContractionKernel, a, b) -> float:
    """``<a b>`` for Majoranas given as ``(kind, site)``."""
    (ka, ia), (kb, ib) = a, b
    if ka == kb:
        if ia != ib:
            return 0.0
        return 1.0 if ka == "A" else -1.0
    if ka == "B":
        return kernel.ba(ib - ia)
    return kernel.ab(ib - ia)


def string_matrix(kernel: ContractionKernel, ops) -> np.ndarray:
    """Antisymmetric Wick matrix ``M[i, j] = <op_i op_j>`` for ``i < j``."""
    m = len(ops)
    M = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            M[i, j] = _contraction(kernel, ops[i], ops[j])
            M[j, i] = -M[i, j]
    return M


def _middle(n):
    ops = []
    for l in range(2, n + 1):
        ops += [("A", l), ("B", l)]
    return ops


def _yy_ops(n):
    ops = [("A", 1)]
    for l in range(2, n + 1):
        ops += [("B", l), ("A", l)]
    return ops + [("B", n + 1)]


def corr_xx_pfaffian(kernel: ContractionKernel, n: int) -> float:
    """``G^xx_n`` from the Pfaffian of the full string contraction matrix."""
    _check_n(kernel, n)
    ops = [("B", 1)]
    for l in range(2, n + 1):
        ops += [("A", l), ("B", l)]
    ops.append(("A", n + 1))
    return 0.25 * pfaffian(string_matrix(kernel, ops))


def corr_yy_pfaffian(kernel: ContractionKernel, n: int) -> float:
    """``G^yy_n`` from the Pfaffian of the full string contraction matrix."""
    _check_n(kernel, n)
    return 0.25 * (-1) ** n * pfaffian(string_matrix(kernel, _yy_ops(n)))


def corr_xy_check(kernel: ContractionKernel, n: int) -> float:
    """Real Pfaffian amplitude of ``G^xy_n`` (string ``B_1 (A B)_{2..n} B_{n+1}``).

    The imaginary-unit prefactor is dropped; the magnitude equals
    ``|G^xy_n|``, which vanishes for every Gaussian profile of this model.
    """
    _check_n(kernel, n)
    ops = [("B", 1)] + _middle(n) + [("B", n + 1)]
    return 0.25 * pfaffian(string_matrix(kernel, ops))


def corr_yx_check(kernel: ContractionKernel, n: int) -> float:
    """Real Pfaffian amplitude of ``G^yx_n`` (string ``A_1 (A B)_{2..n} A_{n+1}``)."""
    _check_n(kernel, n)
    ops = [("A", 1)] + _middle(n) + [("A", n + 1)]
    return 0.25 * pfaffian(string_matrix(kernel, ops))
