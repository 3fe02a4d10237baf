import math

import numpy as np
import pytest

from causalmark.dynamics import DynamicalSystem, ProcessInstance
from causalmark.operators import SIGMA_Y, Projection, ket_projection, pure_state

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- oracles -----------------------------------------------------------------
# Each oracle takes a route that does not share code with the library.

def expm_series(a, terms=80):
    """Matrix exponential by scaled Taylor series with repeated squaring."""
    a = np.asarray(a, dtype=complex)
    s = max(0, int(math.ceil(math.log2(max(np.abs(a).sum(axis=1).max(), 1e-300)))) + 1)
    b = a / 2 ** s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def lueders_expanded(w, p, q):
    """tr(W_P Q) written out with explicit index loops."""
    d = w.shape[0]
    perp = np.eye(d) - p
    total = 0j
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    total += (p[i, j] * w[j, k] * p[k, l] + perp[i, j] * w[j, k] * perp[k, l]) * q[l, i]
    return total


def dense_brickwork_unitary(sys):
    """Step unitary U = U_odd U_even assembled from Kronecker products."""
    n = sys.n_sites
    u = np.eye(2 ** n, dtype=complex)
    for layer in sys.layers:
        lay = np.eye(2 ** n, dtype=complex)
        for i, g in layer:
            lay = np.kron(np.kron(np.eye(2 ** i), g), np.eye(2 ** (n - i - 2))) @ lay
        u = lay @ u
    return u


@pytest.fixture
def f1():
    """H = sigma_y, W = |+><+|, P = Q = |0><0|; delta(t) = sin(2t) / 2."""
    sys = DynamicalSystem(SIGMA_Y)
    p0 = ket_projection([1, 0])
    return ProcessInstance(sys, pure_state([1, 1]), p0), Projection(p0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
