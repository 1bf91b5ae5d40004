import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xysqueeze.model import (
    ModelParams,
    build_grid,
    grid_modes,
    mode_data,
    mode_density_matrix,
    occupation_profile_eigenstate,
    occupation_profile_thermal,
    state_energy,
    vacuum_parity,
)

deltas = st.floats(0.01, 1.0)
fields = st.floats(0.0, 5.0)
sizes = st.integers(2, 64)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(1, 0.5, 0.1)
    with pytest.raises(ValueError):
        ModelParams(10, 0.0, 0.1)
    with pytest.raises(ValueError):
        ModelParams(10, 1.2, 0.1)
    with pytest.raises(ValueError):
        ModelParams(10, 0.5, -0.1)
    p = ModelParams(10, 0.8, 0.3)
    assert p.h_f**2 + p.delta**2 == pytest.approx(1.0, abs=1e-15)


def test_grid_examples():
    g4 = build_grid(4)
    assert np.allclose(g4.ks, [-np.pi / 2, 0, np.pi / 2, np.pi])
    g5 = build_grid(5)
    assert np.allclose(g5.ks, 2 * np.pi * np.array([-2, -1, 0, 1, 2]) / 5)
    g200 = build_grid(200)
    assert len(g200.ks) == 200
    assert g200.ks[-1] == np.pi


@given(sizes)
def test_grids_sorted_and_complete(N):
    for sector in ("periodic", "antiperiodic"):
        g = build_grid(N, sector)
        assert len(g.numerators) == N
        assert np.all(np.diff(g.numerators) > 0)
        assert np.all(np.abs(g.numerators) <= N)
        assert np.all(g.numerators > -N)
        parity = 0 if sector == "periodic" else 1
        assert np.all(g.numerators % 2 == parity)
    assert np.array_equal(build_grid(N).numerators, build_grid(N).numerators)


def test_mode_data_examples():
    p = ModelParams(10, 0.8, 0.6)
    m = mode_data(p, np.pi / 2)
    assert float(m.d_y) == pytest.approx(-0.8)
    assert float(m.d_z) == pytest.approx(-0.6)
    assert float(m.lam) == pytest.approx(1.0)
    for h in (0.0, 0.4, 2.5):
        assert float(mode_data(p.with_h(h), 0.0).lam) == pytest.approx(1 + h, abs=1e-15)
        assert float(mode_data(p.with_h(h), np.pi).lam) == pytest.approx(abs(h - 1), abs=1e-15)
    crit = mode_data(p.with_h(1.0), np.pi)
    assert float(crit.lam) == 0.0
    assert float(crit.cos2theta) == 1.0 and float(crit.sin2theta) == 0.0


@given(sizes, deltas, fields)
def test_mode_symmetries(N, delta, h):
    p = ModelParams(N, delta, h)
    g = build_grid(p)
    m = grid_modes(p, g)
    neg = mode_data(p, -g.ks)
    assert np.allclose(m.lam, neg.lam, atol=1e-14)
    assert np.allclose(m.cos2theta, neg.cos2theta, atol=1e-14)
    assert np.allclose(m.sin2theta, -neg.sin2theta, atol=1e-14)
    pos = m.lam > 0
    assert np.allclose((m.cos2theta**2 + m.sin2theta**2)[pos], 1.0, atol=1e-14)
    assert np.allclose(m.cos2theta[pos] * m.lam[pos], m.d_z[pos], atol=1e-14)
    assert np.allclose(-m.sin2theta[pos] * m.lam[pos], m.d_y[pos], atol=1e-14)
    assert np.all(m.lam >= 0)


def test_thermal_profile_examples():
    p = ModelParams(200, 0.8, 1.0)
    modes = grid_modes(p)
    hot = occupation_profile_thermal(modes, math.inf)
    assert np.all(hot.f == 0.0)
    cold = occupation_profile_thermal(modes, 0.0)
    zero = modes.lam == 0
    assert zero.sum() == 1
    assert np.all(cold.f[~zero] == 1.0) and np.all(cold.f[zero] == 0.0)
    with pytest.raises(ValueError):
        occupation_profile_thermal(modes, -0.1)


@given(deltas, fields, st.floats(1e-3, 10.0), st.floats(1e-3, 10.0))
@settings(max_examples=50)
def test_thermal_profile_monotone(delta, h, t1, t2):
    modes = grid_modes(ModelParams(32, delta, h))
    lo, hi = sorted((t1, t2))
    f_lo = occupation_profile_thermal(modes, lo).f
    f_hi = occupation_profile_thermal(modes, hi).f
    assert np.all(f_lo >= f_hi)
    assert np.all((f_hi >= 0) & (f_hi <= 1))


def test_tanh_saturates_to_one():
    modes = grid_modes(ModelParams(50, 0.8, 2.0))
    f = occupation_profile_thermal(modes, 1e-3).f
    assert np.all(f == 1.0)


def test_eigenstate_profile_examples():
    p = ModelParams(20, 0.8, 0.3)
    g = build_grid(p)
    modes = grid_modes(p, g)
    assert np.all(occupation_profile_eigenstate(modes, ()).f == 1.0)
    assert np.all(occupation_profile_eigenstate(modes, range(20)).f == -1.0)
    i = g.index_of(np.pi)
    f = occupation_profile_eigenstate(modes, {i}).f
    assert f[i] == -1.0 and np.sum(f != 1.0) == 1
    with pytest.raises(IndexError):
        occupation_profile_eigenstate(modes, {20})
    # zero-temperature thermal and empty eigenstate agree away from zero modes
    assert np.array_equal(occupation_profile_thermal(modes, 0.0).f, occupation_profile_eigenstate(modes, ()).f)


def test_state_energy():
    p = ModelParams(200, 0.8, 2.0)
    g = build_grid(p)
    modes = grid_modes(p, g)
    e0 = state_energy(modes, ())
    assert e0 == pytest.approx(-0.5 * modes.lam.sum())
    assert state_energy(modes, {g.index_of(np.pi)}) - e0 == pytest.approx(1.0, abs=1e-12)
    # minimal single-excitation gap, checked against an independent scan
    p3 = ModelParams(200, 0.8, 0.3)
    modes3 = grid_modes(p3)
    ks = 2 * np.pi * np.arange(-99, 101) / 200
    oracle = np.min(np.sqrt(0.64 * np.sin(ks) ** 2 + (np.cos(ks) + 0.3) ** 2))
    gaps = [state_energy(modes3, {i}) - state_energy(modes3, ()) for i in range(200)]
    assert min(gaps) == pytest.approx(oracle, abs=1e-12)
    assert min(gaps) > 0


def test_vacuum_parity():
    # k = 0 is always filled; k = pi is filled only for h > 1
    assert vacuum_parity(ModelParams(10, 0.8, 0.5), build_grid(10)) == -1
    assert vacuum_parity(ModelParams(10, 0.8, 1.5), build_grid(10)) == 1
    assert vacuum_parity(ModelParams(10, 0.8, 1.5), build_grid(10, "antiperiodic")) == 1
    assert vacuum_parity(ModelParams(9, 0.8, 1.5), build_grid(9, "antiperiodic")) == -1


def test_density_matrix_examples():
    p = ModelParams(10, 0.8, 0.7)
    m = mode_data(p, 0.9)
    assert np.allclose(mode_density_matrix(m, 0.0), np.eye(4) / 4, atol=1e-15)
    rho = mode_density_matrix(m, 200.0)
    assert np.trace(rho[:2, :2]).real == pytest.approx(1.0, abs=1e-12)
    assert np.trace(rho[2:, 2:]).real == pytest.approx(0.0, abs=1e-12)


@given(st.floats(-np.pi, np.pi), deltas, fields, st.floats(0.0, 50.0))
def test_density_matrix_is_a_state(k, delta, h, beta):
    rho = mode_density_matrix(mode_data(ModelParams(10, delta, h), k), beta)
    assert abs(np.trace(rho) - 1) <= 1e-14
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-14
    w = np.linalg.eigvalsh(rho)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all(w >= -1e-14)
