import itertools
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mapnet.linmaps import KrausPairDecomposition, map_from_kraus_pairs

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_herm(rng, n):
    g = rand_complex(rng, n, n)
    return (g + g.conj().T) / 2


def rand_density(rng, n):
    g = rand_complex(rng, n, n)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def rand_unitary(rng, n):
    q, r = np.linalg.qr(rand_complex(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_kraus_map(rng, n_in, n_out=None, terms=3, name="random_kraus"):
    """Hermiticity-preserving map ``sum η_i K_i X K_i^dagger`` with real, mixed-sign η."""
    n_out = n_in if n_out is None else n_out
    eta = tuple(float(x) for x in rng.uniform(-1, 1, terms))
    ops = tuple(rand_complex(rng, n_out, n_in) / np.sqrt(n_in) for _ in range(terms))
    return map_from_kraus_pairs(KrausPairDecomposition(eta, ops), name=name)


def brute_cyclic(m, k):
    # |e1..ek> -> |ek e1 .. e_{k-1}>
    n = m**k
    v = np.zeros((n, n))
    for idx in itertools.product(range(m), repeat=k):
        src = np.ravel_multi_index(idx, (m,) * k)
        dst = np.ravel_multi_index((idx[-1],) + idx[:-1], (m,) * k)
        v[dst, src] = 1
    return v


def split_cyclic(dims, k, transpose_b=False):
    """``V_A ⊗ V_B`` (optionally ``V_B^T``) on ``k`` interleaved copies of ``A ⊗ B``."""
    da, db = dims
    va, vb = brute_cyclic(da, k), brute_cyclic(db, k)
    if transpose_b:
        vb = vb.T
    t = np.kron(va, vb).reshape((da,) * k + (db,) * k + (da,) * k + (db,) * k)
    order = [x for s in range(k) for x in (s, k + s)]
    order = order + [2 * k + x for x in order]
    n = (da * db) ** k
    return t.transpose(order).reshape(n, n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
