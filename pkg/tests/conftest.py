"""Shared oracles for the test suite."""

from functools import lru_cache

import numpy as np
import pytest

from xysqueeze.ed import diagonalize
from xysqueeze.model import ModelParams


@lru_cache(maxsize=None)
def ed_spectrum(N: int, delta: float, h: float):
    return diagonalize(ModelParams(N, delta, h))


@pytest.fixture
def spectrum():
    return ed_spectrum


def bdg_contractions(N, delta, h, beta, boundary):
    """``<B_l A_m>`` matrix of the real-space fermion chain at inverse temperature ``beta``.

    Independent of the momentum-space code: builds the site-basis
    Bogoliubov-de Gennes matrix of

        -1/2 sum (c_n^dag c_{n+1} + h.c.) - delta/2 sum (c_n^dag c_{n+1}^dag + h.c.) - h sum n_n

    with ``c_{N+1} = boundary * c_1`` and reads the Gibbs correlations off
    ``(1 + tanh(beta H_BdG / 2)) / 2``.
    """
    M = np.zeros((N, N))
    D = np.zeros((N, N))
    for n in range(N):
        m = (n + 1) % N
        s = boundary if m == 0 else 1.0
        M[n, m] += -0.5 * s
        M[m, n] += -0.5 * s
        # pairing term -delta/2 c_n^dag c_m^dag, antisymmetrized
        D[n, m] += -0.5 * delta * s
        D[m, n] -= -0.5 * delta * s
        M[n, n] += -h
    # H = 1/2 (c^dag, c) [[M, D], [-D, -M]] (c, c^dag)^T + const
    H = np.block([[M, D], [-D, -M]])
    w, V = np.linalg.eigh(H)
    if np.isinf(beta):
        t = np.sign(w)
    else:
        t = np.tanh(0.5 * beta * w)
    # G = <Psi Psi^dag> with Psi = (c, c^dag); thermal occupation
    G = V @ np.diag(0.5 * (1 + t)) @ V.T
    cc_dag = G[:N, :N]  # <c_l c_m^dag>
    cc = G[:N, N:]  # <c_l c_m>
    cdag_cdag = G[N:, :N]  # <c_l^dag c_m^dag>
    cdag_c = G[N:, N:]  # <c_l^dag c_m>
    # B_l A_m = (c_l^dag - c_l)(c_m^dag + c_m)
    return cdag_cdag + cdag_c - cc_dag - cc


def pfaffian_expansion(M):
    """Pfaffian by expansion along the first row (exponential, tiny matrices only)."""
    n = len(M)
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        rest = [k for k in range(1, n) if k != j]
        sub = M[np.ix_(rest, rest)]
        total += (-1) ** (j - 1) * M[0, j] * pfaffian_expansion(sub)
    return total


_ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number: int, passed: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
