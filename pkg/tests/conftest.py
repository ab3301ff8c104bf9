import itertools
from pathlib import Path

import numpy as np
import pytest

from tensorvi import DenseTensor

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def diag_quartic():
    """a_1111 = a_2222 = 1, all other entries zero (0-based indices here)."""
    return DenseTensor.from_sparse((2,) * 4, [((0, 0, 0, 0), 1.0), ((1, 1, 1, 1), 1.0)])


def mixed_quartic():
    """a_1111 = a_2222 = a_2112 = 1, a_1122 = -1 (1-based)."""
    return DenseTensor.from_sparse((2,) * 4, [
        ((0, 0, 0, 0), 1.0), ((1, 1, 1, 1), 1.0), ((1, 0, 0, 1), 1.0), ((0, 0, 1, 1), -1.0),
    ])


# -- brute-force oracles, independent of the library's contraction code ----

def loop_apply_power(data, x):
    data = np.asarray(data)
    n, m = data.shape[0], data.ndim
    out = np.zeros(n)
    for i in range(n):
        s = 0.0
        for rest in itertools.product(range(n), repeat=m - 1):
            term = data[(i,) + rest]
            for j in rest:
                term *= x[j]
            s += term
        out[i] = s
    return out


def loop_contract_trailing(data, us):
    data = np.asarray(data)
    out = np.zeros(data.shape[0])
    for idx in itertools.product(*(range(r) for r in data.shape)):
        term = data[idx]
        for u, j in zip(us, idx[1:]):
            term *= u[j]
        out[idx[0]] += term
    return out


def loop_full_contraction(data, xs):
    data = np.asarray(data)
    total = 0.0
    for idx in itertools.product(*(range(r) for r in data.shape)):
        term = data[idx]
        for x, j in zip(xs, idx):
            term *= x[j]
        total += term
    return total


def lcp_enumerate(M, q):
    """All solutions of x >= 0, Mx + q >= 0, x'(Mx + q) = 0 by trying every active pattern."""
    n = len(q)
    sols = []
    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            S = list(S)
            x = np.zeros(n)
            if S:
                try:
                    x[S] = np.linalg.solve(M[np.ix_(S, S)], -q[S])
                except np.linalg.LinAlgError:
                    continue
            w = M @ x + q
            if np.all(x >= -1e-12) and np.all(w >= -1e-10):
                sols.append(x)
    return sols


@pytest.fixture
def A41():
    return diag_quartic()


@pytest.fixture
def A42():
    return mixed_quartic()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
