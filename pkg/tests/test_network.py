import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rand_density, rand_herm, rand_unitary, seeds
from mapnet.errors import DegenerateObservableError, InconsistentPovmError, InvalidVisibilityError
from mapnet.linmaps import builtin_maps
from mapnet.network import (BinaryPovm, binary_povm, controlled_form, dilation_unitary, mean_from_visibility,
                            reassemble, rotation, simulate_shots, synthesize, visibility_exact,
                            visibility_interval)
from mapnet.observables import Observable, collective_observable
from mapnet.tensor import SIGMA_Y, is_unitary


def check_contracts(o, sigma, uprime_alt):
    net = synthesize(o)
    p, d = net.povm, net.dilation
    assert p.completeness_error() < 1e-8
    assert p.commutator_error() < 1e-8
    assert is_unitary(d.U_A, 1e-8)
    v = net.visibility(sigma)
    assert abs(net.mean(v) - o.mean(sigma)) < 1e-8
    assert abs(visibility_exact(d, sigma, uprime_alt) - v) < 1e-10
    assert np.max(np.abs(reassemble(d.thetas, d.uprime) - d.U_A)) < 1e-8


@given(seeds, st.integers(2, 6), st.floats(-3, 3))
def test_random_observable_contracts(seed, n, shift):
    rng = np.random.default_rng(seed)
    o = Observable.from_matrix(rand_herm(rng, n) + shift * np.eye(n))
    check_contracts(o, rand_density(rng, n), rand_unitary(rng, n))


@pytest.mark.parametrize("dims,k", [((2, 2), 1), ((2, 2), 2), ((2, 2), 3), ((2, 3), 2)])
def test_collective_observable_contracts(dims, k):
    rng = np.random.default_rng(k)
    o = collective_observable(builtin_maps("partial_transpose", dims), k)
    rho = rand_density(rng, dims[0] * dims[1])
    sigma = rho
    for _ in range(k - 1):
        sigma = np.kron(sigma, rho)
    check_contracts(o, sigma, rand_unitary(rng, o.dim))


def test_psd_observable_has_zero_a_minus():
    p = binary_povm(Observable.from_matrix(np.diag([0.0, 1.0, 3.0])))
    assert p.a_minus == 0.0 and p.a_plus == 3.0
    assert np.allclose(np.diag(p.V0 @ p.V0), [0, 1 / 3, 1])


def test_affine_coefficients_for_indefinite_observable():
    p = binary_povm(Observable.from_matrix(np.diag([-1.0, 2.0])))
    assert (p.a_minus, p.a_plus) == (1.0, 3.0)


def test_degenerate_observable():
    with pytest.raises(DegenerateObservableError):
        binary_povm(Observable.from_matrix(-np.eye(2)))
    with pytest.raises(DegenerateObservableError):
        binary_povm(Observable.from_matrix(np.zeros((2, 2))))


def test_constant_positive_observable_reads_out():
    net = synthesize(Observable.from_matrix(2 * np.eye(2)))
    v = net.visibility(np.eye(2) / 2)
    assert abs(v - 1) < 1e-12 and abs(net.mean(v) - 2) < 1e-12


def test_noncommuting_povm_rejected():
    v0 = np.diag([1.0, 0.0])
    v1 = np.array([[0, 1], [1, 0]]) / np.sqrt(2)
    with pytest.raises(InconsistentPovmError):
        dilation_unitary(BinaryPovm(v0, v1, 0.0, 1.0))


def test_dilation_without_cached_basis():
    p = binary_povm(Observable.from_matrix(np.diag([0.2, 0.7, 1.0])))
    bare = BinaryPovm(p.V0, p.V1, p.a_minus, p.a_plus)
    d = dilation_unitary(bare)
    assert np.allclose(reassemble(d.thetas, d.uprime), d.U_A, atol=1e-12)
    assert np.allclose(np.sort(d.lambdas), [0.2, 0.7, 1.0])


def test_rotation_and_controlled_form():
    assert np.allclose(rotation(np.pi), -1j * SIGMA_Y)
    d = synthesize(Observable.from_matrix(np.diag([0.0, 1.0]))).dilation
    assert [k for k, _ in controlled_form(d)] == [0, 1]
    assert np.allclose(sorted(t for _, t in controlled_form(d)), [0, np.pi])


def test_mean_from_visibility_edges(caplog):
    p = binary_povm(Observable.from_matrix(np.diag([-1.0, 1.0])))
    assert mean_from_visibility(1.0, p) == 1.0
    assert mean_from_visibility(-1.0, p) == -1.0
    with caplog.at_level(logging.WARNING):
        assert mean_from_visibility(1 + 5e-10, p) == 1.0
    assert "clamping" in caplog.text
    with pytest.raises(InvalidVisibilityError):
        mean_from_visibility(1.01, p)


def test_visibility_interval():
    p = binary_povm(Observable.from_matrix(np.diag([-1.0, 3.0])))
    lo, hi = visibility_interval(-1.0, 3.0, p)
    assert np.isclose(lo, -1) and np.isclose(hi, 1)
    lo, hi = visibility_interval(0.0, 1.0, p)
    assert np.isclose(mean_from_visibility(lo, p), 0.0) and np.isclose(mean_from_visibility(hi, p), 1.0)
    with pytest.raises(ValueError):
        visibility_interval(-2.0, 0.0, p)
    with pytest.raises(ValueError):
        visibility_interval(1.0, 0.0, p)


def test_visibility_shape_checked():
    net = synthesize(Observable.from_matrix(np.diag([0.0, 1.0])))
    with pytest.raises(ValueError):
        net.visibility(np.eye(3) / 3)


@given(st.floats(0, 1), st.integers(1, 10**6), seeds)
def test_shots_reproducible(p0, shots, seed):
    a = simulate_shots(p0, shots, [seed, 2])
    b = simulate_shots(p0, shots, [seed, 2])
    assert a == b
    assert 0 <= a.p0_hat <= 1 and abs(a.v_hat - (2 * a.p0_hat - 1)) < 1e-15


def test_shots_statistics():
    est = [simulate_shots(0.3, 10_000, [1, i]).v_hat for i in range(200)]
    assert abs(np.mean(est) - (-0.4)) < 4 * 0.0092 / np.sqrt(200)
    sd = simulate_shots(0.3, 10_000, 0).std_error
    assert abs(np.std(est) - sd) < 0.2 * sd


def test_shots_validation():
    with pytest.raises(ValueError):
        simulate_shots(0.5, 0, 1)
    with pytest.raises(ValueError):
        simulate_shots(1.2, 10, 1)
