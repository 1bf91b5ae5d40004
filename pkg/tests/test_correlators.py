import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bdg_contractions, pfaffian_expansion
from xysqueeze.correlators import (
    ContractionKernel,
    contraction_kernel,
    corr_xx,
    corr_xx_pfaffian,
    corr_xy_check,
    corr_yx_check,
    corr_yy,
    corr_yy_pfaffian,
    correlator_table,
    leading_minors,
    pfaffian,
)
from xysqueeze.model import (
    ModelParams,
    Custom,
    OccupationProfile,
    build_grid,
    grid_modes,
    occupation_profile_eigenstate,
    occupation_profile_thermal,
)


def kernel_for(N, delta, h, T, sector="periodic"):
    p = ModelParams(N, delta, h)
    g = build_grid(p, sector)
    modes = grid_modes(p, g)
    return contraction_kernel(occupation_profile_thermal(modes, T), modes, g)


def random_antisymmetric(rng, n):
    a = rng.normal(size=(n, n))
    return a - a.T


# --- Pfaffian -------------------------------------------------------------


def test_pfaffian_small_cases():
    assert pfaffian(np.zeros((0, 0))) == 1.0
    assert pfaffian(np.array([[0, 2.5], [-2.5, 0]])) == 2.5
    a, b, c, d, e, f = 1.3, -0.7, 2.1, 0.4, -1.9, 0.8
    M = np.array([[0, a, b, c], [-a, 0, d, e], [-b, -d, 0, f], [-c, -e, -f, 0]])
    assert pfaffian(M) == pytest.approx(a * f - b * e + d * c, rel=1e-14)


def test_pfaffian_rejects_bad_input():
    with pytest.raises(ValueError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        pfaffian(np.array([[0, 1.0], [1.0, 0]]))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=40)
def test_pfaffian_squares_to_determinant(half, seed):
    M = random_antisymmetric(np.random.default_rng(seed), 2 * half)
    pf = pfaffian(M)
    det = np.linalg.det(M)
    assert pf**2 == pytest.approx(det, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_pfaffian_matches_expansion(n):
    M = random_antisymmetric(np.random.default_rng(n), n)
    assert pfaffian(M) == pytest.approx(pfaffian_expansion(M), rel=1e-10)


# --- contraction kernel ---------------------------------------------------


@pytest.mark.parametrize("sector,boundary", [("periodic", 1.0), ("antiperiodic", -1.0)])
@pytest.mark.parametrize("h,T", [(0.3, 0.4), (0.6, 0.0), (1.4, 1.1), (0.95, 0.07)])
def test_kernel_matches_real_space_oracle(sector, boundary, h, T):
    N, delta = 11, 0.8
    kern = kernel_for(N, delta, h, T, sector)
    beta = math.inf if T == 0 else 1 / T
    BA = bdg_contractions(N, delta, h, beta, boundary)
    for l in range(N):
        for m in range(N):
            r = m - l
            assert kern.ba(r) == pytest.approx(BA[l, m], abs=1e-12)


def test_kernel_vanishes_at_infinite_temperature():
    kern = kernel_for(30, 0.8, 0.7, math.inf)
    assert np.all(kern.values == 0.0)


def test_kernel_polarized_limit():
    kern = kernel_for(200, 0.8, 50.0, 0.0)
    assert abs(kern.ba(0)) == pytest.approx(1.0, abs=1e-3)
    others = np.delete(kern.values, 199)
    assert np.max(np.abs(others)) < 1e-2


def test_exchange_consistency():
    kern = kernel_for(16, 0.6, 0.9, 0.3)
    BA = bdg_contractions(16, 0.6, 0.9, 1 / 0.3, 1.0)
    for n in range(16):
        for m in range(16):
            if n != m:
                # <A_n B_m> = -<B_m A_n>
                assert kern.ab(m - n) == pytest.approx(-BA[m, n], abs=1e-12)
    assert kern.ab(2) == -kern.ba(-2)


# --- Toeplitz versus Pfaffian -------------------------------------------


def random_profiles(count=20, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        N = int(rng.integers(10, 24))
        p = ModelParams(N, float(rng.uniform(0.05, 1.0)), float(rng.uniform(0, 2.5)))
        g = build_grid(p)
        modes = grid_modes(p, g)
        kind = i % 3
        if kind == 0:
            prof = occupation_profile_thermal(modes, float(rng.uniform(0.01, 3)))
        elif kind == 1:
            occ = rng.choice(N, size=int(rng.integers(0, 4)), replace=False)
            prof = occupation_profile_eigenstate(modes, occ)
        else:
            prof = OccupationProfile(rng.uniform(-1, 1, N), Custom())
        out.append(contraction_kernel(prof, modes, g))
    return out


@pytest.mark.parametrize("kern", random_profiles())
def test_toeplitz_equals_pfaffian(kern):
    for n in range(1, 9):
        for a, b in ((corr_xx(kern, n), corr_xx_pfaffian(kern, n)), (corr_yy(kern, n), corr_yy_pfaffian(kern, n))):
            assert abs(a - b) <= 1e-10 * max(1.0, abs(b))
        assert abs(corr_xy_check(kern, n)) <= 1e-12
        assert abs(corr_yx_check(kern, n)) <= 1e-12


def test_first_correlators_are_single_contractions():
    kern = kernel_for(12, 0.8, 0.5, 0.2)
    assert corr_xx(kern, 1) == pytest.approx(0.25 * kern.ba(1), abs=1e-15)
    # G^yy_1 = -1/4 <A_1 B_2>
    assert corr_yy(kern, 1) == pytest.approx(-0.25 * kern.ab(1), abs=1e-15)


def test_zero_profile_gives_zero_correlators():
    kern = kernel_for(12, 0.8, 0.5, math.inf)
    for n in range(1, 7):
        assert corr_xx(kern, n) == 0.0 and corr_yy(kern, n) == 0.0
        assert corr_xy_check(kern, n) == 0.0 and corr_yx_check(kern, n) == 0.0


def test_n_out_of_range():
    kern = kernel_for(8, 0.8, 0.5, 0.2)
    with pytest.raises(ValueError):
        corr_xx(kern, 0)
    with pytest.raises(ValueError):
        corr_yy(kern, 8)


# --- full tables ------------------------------------------------------------


def table_for(N, delta, h, T, method="qr"):
    p = ModelParams(N, delta, h)
    modes = grid_modes(p)
    return correlator_table(occupation_profile_thermal(modes, T), modes, method=method)


def test_table_at_infinite_temperature_is_zero():
    t = table_for(40, 0.8, 0.6, math.inf)
    assert np.all(t.gxx == 0) and np.all(t.gyy == 0)


def test_table_is_deterministic():
    a, b = table_for(64, 0.8, 0.6, 0.1), table_for(64, 0.8, 0.6, 0.1)
    assert a.gxx.tobytes() == b.gxx.tobytes() and a.gyy.tobytes() == b.gyy.tobytes()


@pytest.mark.parametrize("h,T", [(0.3, 0.0), (0.6, 0.05), (1.0, 0.01), (2.0, 0.5)])
def test_qr_matches_pivoted_lu(h, T):
    a, b = table_for(80, 0.8, h, T), table_for(80, 0.8, h, T, "lu")
    assert np.max(np.abs(a.gxx - b.gxx)) < 1e-12
    assert np.max(np.abs(a.gyy - b.gyy)) < 1e-12


def test_leading_minors_on_random_matrix():
    T = np.random.default_rng(3).normal(size=(30, 30))
    s, l = leading_minors(T)
    dets = [np.linalg.det(T[:n, :n]) for n in range(1, 31)]
    assert np.allclose(s * np.exp(l), dets, rtol=1e-9)


def test_paramagnetic_correlations_decay():
    t = table_for(64, 0.8, 2.0, 0.0)
    env = np.maximum.accumulate(np.abs(t.gxx)[::-1])[::-1]
    assert np.all(np.diff(env[:30]) <= 0)
    assert abs(t.gxx[29]) < 1e-6 * abs(t.gxx[0])


@pytest.mark.parametrize("T", [0.0, 0.3, 2.0])
def test_spin_bound(T):
    t = table_for(50, 0.8, 0.8, T)
    assert np.all(np.abs(t.gxx) <= 0.25 + 1e-14) and np.all(np.abs(t.gyy) <= 0.25 + 1e-14)


def test_kernel_needs_matching_sizes():
    p = ModelParams(10, 0.8, 0.5)
    modes = grid_modes(p)
    prof = occupation_profile_thermal(modes, 0.5)
    with pytest.raises(ValueError):
        contraction_kernel(prof, modes, build_grid(12))
    with pytest.raises(ValueError):
        ContractionKernel(5, np.zeros(3))


def test_ground_state_correlators_match_twelve_site_ed():
    from conftest import ed_spectrum
    from xysqueeze.ed import pair_correlators
    from xysqueeze.squeezing import thermal_table

    t = thermal_table(ModelParams(12, 0.8, 0.6), 0.0)
    ed = pair_correlators(ed_spectrum(12, 0.8, 0.6), 12, 0.0)
    assert np.allclose(t.gxx[:5], ed["x"][1:6].real, atol=1e-12)
    assert np.allclose(t.gyy[:5], ed["y"][1:6].real, atol=1e-12)
