"""Spin-squeezing parameter of thermal states and Bogoliubov eigenstates.

With the mean spin along ``z`` and no mixed ``xy`` correlations the
minimal in-plane variance parameter reduces to

    xi^2 = 1 + 2 sum_n (G^xx_n + G^yy_n) - 2 |sum_n (G^xx_n - G^yy_n)|.

Thermal states
--------------
The Jordan-Wigner map sends even-parity spin states to fermions on the
antiperiodic grid and odd-parity states to the periodic grid.  The Gibbs
state therefore mixes four fermionic Gaussians: in each sector the plain
``tanh`` profile and a parity-twisted ``coth`` profile whose weight carries
the sign that removes the wrong-parity half.  ``ensemble="projected"``
evaluates this exactly; ``ensemble="periodic"`` uses the plain ``tanh``
profile on the periodic grid alone, the textbook shortcut that ignores the
parity constraint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.optimize import minimize

from .correlators import (
    ContractionKernel,
    CorrelatorTable,
    Method,
    contraction_kernel,
    correlator_table,
    string_log_minors,
    table_from_kernel,
)
from .model import (
    Eigenstate,
    ModelParams,
    OccupationProfile,
    Sector,
    Thermal,
    Twisted,
    build_grid,
    grid_modes,
    occupation_profile_eigenstate,
    occupation_profile_thermal,
    saturating_tanh,
    vacuum_parity,
)

Ensemble = Literal["projected", "periodic"]

COHERENCE_TOL = 1e-9  # |xi^2 - 1| at or below this counts as coherent
DEGENERACY_TOL = 1e-10  # ground states closer than this are mixed equally


class Regime(enum.Enum):
    SQUEEZED = "squeezed"
    COHERENT = "coherent"
    UNSQUEEZED = "unsqueezed"


def classify(xi2: float, tol: float = COHERENCE_TOL) -> Regime:
    if abs(xi2 - 1.0) <= tol:
        return Regime.COHERENT
    return Regime.SQUEEZED if xi2 < 1.0 else Regime.UNSQUEEZED


@dataclass(frozen=True)
class SqueezingValue:
    xi2: float
    regime: Regime

    @classmethod
    def of(cls, xi2: float) -> "SqueezingValue":
        return cls(float(xi2), classify(float(xi2)))

    @property
    def squeezed(self) -> bool:
        return self.regime is Regime.SQUEEZED


def ssp_from_sums(sxx, syy):
    """``1 + 2 (Sxx + Syy) - 2 |Sxx - Syy|`` for summed correlators."""
    return 1.0 + 2.0 * (sxx + syy) - 2.0 * np.abs(sxx - syy)


def ssp_from_table(table: CorrelatorTable) -> SqueezingValue:
    return SqueezingValue.of(ssp_from_sums(table.gxx.sum(), table.gyy.sum()))


# ---------------------------------------------------------------------------
# parity sectors


@dataclass(frozen=True)
class _Sector:
    grid: object
    modes: object
    target: int  # fermion parity of the physical states living on this grid
    vacuum: int  # fermion parity of the Bogoliubov vacuum

    @property
    def lam(self):
        return self.modes.lam


def _sectors(params: ModelParams) -> list[_Sector]:
    out = []
    for name, target in (("antiperiodic", 1), ("periodic", -1)):
        grid = build_grid(params, name)
        out.append(_Sector(grid, grid_modes(params, grid), target, vacuum_parity(params, grid)))
    return out


def _log_cosh(x):
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def _log_tanh(x):
    # log tanh x = log(1 - e^{-2x}) - log(1 + e^{-2x})
    e = np.exp(-2.0 * x)
    return np.log(-np.expm1(-2.0 * x)) - np.log1p(e)


def _kernel(sec: _Sector, f, kind) -> ContractionKernel:
    return contraction_kernel(OccupationProfile(f, kind), sec.modes, sec.grid)


def _projected_terms(params: ModelParams, beta: float):
    """Gaussian components of the exact Gibbs state at finite ``beta``.

    Yields ``(log_weight, coefficient, kernel)`` for the numerator and
    ``(log_weight, coefficient)`` for the partition function.  Weights
    share the dropped factor ``prod_k 2``.
    """
    num, den = [], []
    for sec in _sectors(params):
        lam = sec.lam
        x = 0.5 * beta * lam
        lz = float(np.sum(_log_cosh(x)))
        num.append((lz, 1.0, _kernel(sec, saturating_tanh(x), Thermal(beta))))
        den.append((lz, 1.0))

        s = float(sec.vacuum * sec.target)
        zero = lam == 0
        lw = lz + float(np.sum(_log_tanh(x[~zero])))
        coth = np.ones_like(x)
        coth[~zero] = 1.0 / saturating_tanh(x[~zero])
        if not zero.any():
            num.append((lw, s, _kernel(sec, coth, Twisted(beta))))
            den.append((lw, s))
            continue
        # A zero mode has tanh = 0 and coth = inf.  The string determinants
        # are affine in that mode's weight, so the product tanh * det(coth)
        # equals det(f_z = 1) - det(f_z = 0) with the rest unchanged; the
        # twisted partition function vanishes.
        lo = coth.copy()
        lo[zero] = 0.0
        num.append((lw, s, _kernel(sec, coth, Twisted(beta))))
        num.append((lw, -s, _kernel(sec, lo, Twisted(beta))))
    return num, den


def _mix_projected(num, den, method: Method) -> CorrelatorTable:
    logs = []
    for lw, c, kernel in num:
        sx, lx, sy, ly = string_log_minors(kernel, method)
        logs.append((c, sx, lw + lx, sy, lw + ly))
    shift = max([lw for lw, _ in den] + [float(np.max(t[2])) for t in logs] + [float(np.max(t[4])) for t in logs])
    z = sum(c * math.exp(lw - shift) for lw, c in den)
    gx = sum(c * sx * np.exp(lx - shift) for c, sx, lx, _, _ in logs)
    gy = sum(c * sy * np.exp(ly - shift) for c, _, _, sy, ly in logs)
    return CorrelatorTable(0.25 * gx / z, 0.25 * gy / z)


@dataclass(frozen=True)
class GroundState:
    """A lowest-energy physical Fock state of one parity sector."""

    sector: Sector
    energy: float
    excited: tuple  # grid indices of quasiparticles on top of the vacuum
    f: np.ndarray = field(repr=False)


def ground_states(params: ModelParams, tol: float = DEGENERACY_TOL) -> list[GroundState]:
    """Physical ground state(s) of the spin chain.

    In each sector the vacuum is physical when its parity matches the
    sector; otherwise the cheapest single quasiparticle is added.  All
    candidates within ``tol`` of the lowest energy are returned.
    """
    cands = []
    for sec in _sectors(params):
        lam = sec.lam
        e = -0.5 * float(lam.sum())
        f = np.ones(len(lam))
        excited = ()
        if sec.vacuum != sec.target:
            j = int(np.argmin(lam))
            e += float(lam[j])
            f[j] = -1.0
            excited = (j,)
        cands.append((e, sec, excited, f))
    e0 = min(c[0] for c in cands)
    return [GroundState(sec.grid.sector, e, ex, f) for e, sec, ex, f in cands if e - e0 <= tol]


def _ground_table(params: ModelParams, method: Method) -> CorrelatorTable:
    secs = {s.grid.sector: s for s in _sectors(params)}
    tables = []
    for gs in ground_states(params):
        sec = secs[gs.sector]
        occ = frozenset(gs.excited)
        tables.append(table_from_kernel(_kernel(sec, gs.f, Eigenstate(occ)), method))
    return CorrelatorTable(
        np.mean([t.gxx for t in tables], axis=0), np.mean([t.gyy for t in tables], axis=0)
    )


def thermal_table(
    params: ModelParams, T: float, ensemble: Ensemble = "projected", method: Method = "qr"
) -> CorrelatorTable:
    """Correlator table of the thermal state at temperature ``T``.

    ``T = 0`` gives the ground state (equal mixture if degenerate) and
    ``T = inf`` the maximally mixed state, whose correlators all vanish.
    """
    if not (T >= 0):
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    if math.isinf(T):
        z = np.zeros(params.N - 1)
        return CorrelatorTable(z, z)
    if ensemble == "periodic":
        grid = build_grid(params)
        modes = grid_modes(params, grid)
        return correlator_table(occupation_profile_thermal(modes, T), modes, grid, method)
    if ensemble != "projected":
        raise ValueError(f"unknown ensemble {ensemble!r}")
    if T == 0:
        return _ground_table(params, method)
    return _mix_projected(*_projected_terms(params, 1.0 / T), method)


def ssp_thermal(
    params: ModelParams, T: float, ensemble: Ensemble = "projected", method: Method = "qr"
) -> SqueezingValue:
    """Squeezing parameter of the Gibbs state at temperature ``T`` (``T = 0``: ground state)."""
    return ssp_from_table(thermal_table(params, T, ensemble, method))


def ssp_eigenstate(
    params: ModelParams,
    occupied,
    sector: Sector = "periodic",
    method: Method = "qr",
) -> SqueezingValue:
    """Squeezing parameter of a Bogoliubov Fock state from ``f_k = 1 - 2 n_k``."""
    grid = build_grid(params, sector)
    modes = grid_modes(params, grid)
    profile = occupation_profile_eigenstate(modes, occupied)
    return ssp_from_table(correlator_table(profile, modes, grid, method))


# ---------------------------------------------------------------------------
# coherent temperatures


@dataclass(frozen=True)
class CoherentTemperatureResult:
    """Temperatures where the thermal state crosses ``xi^2 = 1``.

    Attributes
    ----------
    roots : tuple of float
        Ascending coherent temperatures.
    bracket : tuple
        ``(T_min, T_max, step)`` of the scan.
    residuals : tuple of float
        ``xi^2(T_co) - 1`` at each root.
    """

    roots: tuple
    bracket: tuple
    residuals: tuple = ()


def _scan_grid(T_range, step):
    lo, hi = float(T_range[0]), float(T_range[1])
    if step <= 0 or hi <= 0 or hi < lo:
        raise ValueError("need step > 0 and 0 <= T_min <= T_max")
    lo = max(lo, step) if lo <= 0 else lo
    n = int(math.floor((hi - lo) / step + 1e-9))
    ts = lo + step * np.arange(n + 1)
    if hi - ts[-1] > 1e-12:
        ts = np.append(ts, hi)
    return ts


def bisect_crossing(g: Callable[[float], float], a: float, b: float, ga: float, gb: float,
                    ftol: float = 1e-8, xtol: float = 1e-10) -> tuple[float, float]:
    """Bisection for ``g = 0`` in ``[a, b]`` with ``ga * gb < 0``."""
    while True:
        if abs(ga) <= ftol or abs(gb) <= ftol or b - a <= xtol:
            return (a, ga) if abs(ga) <= abs(gb) else (b, gb)
        m = 0.5 * (a + b)
        gm = g(m)
        if gm == 0.0:
            return m, gm
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b, gb = m, gm


def find_coherent_temperatures(
    params: ModelParams,
    T_range=(0.0, 2.0),
    step: float = 0.01,
    ensemble: Ensemble = "projected",
    method: Method = "qr",
    evaluate: Callable[[ModelParams, float], float] | None = None,
) -> CoherentTemperatureResult:
    """All roots of ``xi^2(T) = 1`` on a uniform scan refined by bisection.

    Sign changes of ``xi^2 - 1`` between consecutive scan points are
    refined until ``|xi^2 - 1| <= 1e-8`` or the bracket is below ``1e-10``.
    Scan points that hit the tolerance directly are reported as roots.
    """
    if evaluate is None:
        def evaluate(p, t):
            return ssp_thermal(p, t, ensemble, method).xi2

    def g(t):
        return evaluate(params, t) - 1.0

    ts = _scan_grid(T_range, step)
    roots, res = refine_roots(g, ts, [g(t) for t in ts])
    return CoherentTemperatureResult(roots, (float(ts[0]), float(ts[-1]), float(step)), res)


def refine_roots(g: Callable[[float], float], ts, gs, ftol: float = 1e-8, xtol: float = 1e-10):
    """Roots of ``g`` from samples ``gs = g(ts)``: sign changes are bisected.

    Samples already within ``ftol`` of zero are roots themselves (a run of
    such samples counts once).  Returns ascending roots and residuals.
    """
    roots, res = [], []
    for i, t in enumerate(ts):
        if abs(gs[i]) <= ftol and not (i and abs(gs[i - 1]) <= ftol):
            roots.append(float(t))
            res.append(float(gs[i]))
    for i in range(len(ts) - 1):
        ga, gb = gs[i], gs[i + 1]
        if abs(ga) <= ftol or abs(gb) <= ftol:
            continue
        if (ga < 0) != (gb < 0):
            t, r = bisect_crossing(g, ts[i], ts[i + 1], ga, gb, ftol, xtol)
            roots.append(float(t))
            res.append(float(r))
    order = np.argsort(roots)
    return tuple(roots[i] for i in order), tuple(res[i] for i in order)


def thermal_factorized_curve(
    delta: float,
    h_grid: Sequence[float],
    T_range=(0.0, 2.0),
    step: float = 0.01,
    N: int = 200,
    ensemble: Ensemble = "projected",
    method: Method = "qr",
) -> list[tuple[float, float]]:
    """``(h, T_co)`` pairs; fields with several roots contribute several rows."""
    pts = []
    for h in h_grid:
        res = find_coherent_temperatures(ModelParams(N, delta, h), T_range, step, ensemble, method)
        pts.extend((float(h), t) for t in res.roots)
    return pts


# ---------------------------------------------------------------------------
# thermal factorized field fit


@dataclass(frozen=True)
class ThermalFactorizedFit:
    """``h(T) = h_f + a T + b tanh(c T)`` fitted to coherent-temperature data.

    ``residual`` is the root-mean-square misfit in ``h``.
    """

    h_f: float
    a: float
    b: float
    c: float
    residual: float
    converged: bool

    def __call__(self, T):
        T = np.asarray(T, dtype=float)
        return self.h_f + self.a * T + self.b * np.tanh(self.c * T)


def fit_factorized_field(
    points: Sequence[tuple[float, float]], h_f: float, maxiter: int = 20000
) -> ThermalFactorizedFit:
    """Least-squares fit of ``h = h_f + a T + b tanh(c T)`` with ``h_f`` fixed.

    ``points`` holds ``(T_co, h)`` pairs.  Nelder-Mead runs from a fixed
    grid of starting points and the best run is restarted once to polish.
    ``(b, c)`` and ``(-b, -c)`` describe the same curve; ``c >= 0`` is
    reported.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least three (T_co, h) points")
    T, h = pts[:, 0], pts[:, 1] - h_f

    def loss(p):
        a, b, c = p
        return float(np.sum((a * T + b * np.tanh(c * T) - h) ** 2))

    slope = float(np.dot(T, h) / np.dot(T, T)) if np.any(T) else 0.0
    span = 1.0 / max(float(np.median(T[T > 0])) if np.any(T > 0) else 1.0, 1e-12)
    starts = [
        (slope, b, c * span)
        for b in (-0.5, -0.1, 0.1, 0.5)
        for c in (0.3, 1.0, 3.0, 10.0)
    ]
    opts = dict(xatol=1e-12, fatol=1e-16, maxiter=maxiter, maxfev=2 * maxiter)
    best = None
    for x0 in starts:
        r = minimize(loss, x0, method="Nelder-Mead", options=opts)
        if best is None or r.fun < best.fun:
            best = r
    polish = minimize(loss, best.x, method="Nelder-Mead", options=opts)
    if polish.fun <= best.fun:
        best = polish
    a, b, c = (float(v) for v in best.x)
    if c < 0:
        b, c = -b, -c
    rms = math.sqrt(best.fun / len(T))
    return ThermalFactorizedFit(float(h_f), a, b, c, rms, bool(best.success))
