import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rand_complex, rand_density, rand_herm, rand_kraus_map, seeds
from mapnet.linmaps import (KrausPairDecomposition, LinearMap, UnknownMapError, apply, builtin_maps, choi_matrix,
                            completely_positive, compose, conjugate_map, dual_map, extend_with_identity,
                            hermiticity_preserving, map_from_kraus_pairs, pair_product_map, primed_map,
                            reduction_kraus_pairs, reduction_map, trace_preserving)
from mapnet.tensor import partial_transpose, realign


def kraus_apply(d, x):
    return sum(e * k @ x @ k.conj().T for e, k in zip(d.eta, d.ops))


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_kraus_superop_matches_direct_sum(seed, n, r):
    rng = np.random.default_rng(seed)
    m = rand_kraus_map(rng, n, r)
    x = rand_complex(rng, n, n)
    assert np.allclose(apply(m, x), kraus_apply(m.kraus, x), atol=1e-12)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_dual_pairing(seed, n, r):
    rng = np.random.default_rng(seed)
    m = rand_kraus_map(rng, n, r)
    x, y = rand_complex(rng, n, n), rand_complex(rng, r, r)
    d = dual_map(m)
    assert np.isclose(np.trace(y @ apply(m, x)), np.trace(apply(d, y) @ x), atol=1e-10)
    # for Kraus maps the dual is sum η K^dagger Y K
    ref = sum(e * k.conj().T @ y @ k for e, k in zip(m.kraus.eta, m.kraus.ops))
    assert np.allclose(apply(d, y), ref, atol=1e-12)
    assert np.allclose(dual_map(d).superop, m.superop)


def test_dual_of_rectangular_map():
    m = builtin_maps("index_permutation", (2, 3), perm=(0, 2, 1, 3))
    assert m.dst_shape == (4, 9)
    rng = np.random.default_rng(1)
    x, y = rand_complex(rng, 6, 6), rand_complex(rng, 9, 4)
    d = dual_map(m)
    assert d.src_shape == (9, 4)
    assert np.isclose(np.trace(y @ apply(m, x)), np.trace(apply(d, y) @ x))


@given(seeds, st.integers(1, 3))
def test_conjugate_and_primed(seed, n):
    rng = np.random.default_rng(seed)
    m = LinearMap(rand_complex(rng, n * n, n * n), (n, n), (n, n))
    x = rand_complex(rng, n, n)
    assert np.allclose(apply(conjugate_map(m), x), apply(m, x.conj()).conj(), atol=1e-12)
    p = primed_map(m)
    assert np.allclose(apply(p, x), apply(m, x.conj().T).conj().T, atol=1e-12)
    h = rand_herm(rng, n)
    assert np.allclose(apply(p, h), apply(m, h).conj().T, atol=1e-12)
    assert np.allclose(primed_map(p).superop, m.superop)


def test_primed_identity_on_hermitian_input():
    p = primed_map(builtin_maps("identity", 3))
    h = rand_herm(np.random.default_rng(0), 3)
    assert np.allclose(apply(p, h), h.conj().T)


@given(seeds, st.sampled_from([1, 2, 3]), st.sampled_from([2, 3]))
def test_extend_with_identity_on_products(seed, da, db):
    rng = np.random.default_rng(seed)
    lam = rand_kraus_map(rng, db)
    a, b = rand_complex(rng, da, da), rand_complex(rng, db, db)
    ext = extend_with_identity(lam, da)
    assert np.allclose(apply(ext, np.kron(a, b)), np.kron(a, apply(lam, b)), atol=1e-12)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
def test_builtin_partial_transpose(dims):
    rho = rand_density(np.random.default_rng(5), dims[0] * dims[1])
    pt = builtin_maps("partial_transpose", dims)
    assert np.allclose(apply(pt, rho), partial_transpose(rho, 1, dims))
    perm = builtin_maps("index_permutation", dims, perm=(0, 3, 2, 1))
    assert np.allclose(apply(perm, rho), partial_transpose(rho, 1, dims))


def test_builtin_realignment():
    rho = rand_density(np.random.default_rng(6), 6)
    assert np.allclose(apply(builtin_maps("realignment", (2, 3)), rho), realign(rho, (2, 3)))


def test_builtin_maps_cached_and_unknown():
    assert builtin_maps("transpose", 2) is builtin_maps("transpose", [2])
    with pytest.raises(UnknownMapError):
        builtin_maps("nope", 2)


@pytest.mark.parametrize("d", [2, 3])
def test_reduction_forms_agree(d):
    x = rand_complex(np.random.default_rng(d), d, d)
    red = reduction_map(d)
    assert np.allclose(apply(red, x), np.trace(x) * np.eye(d) - x)
    assert np.allclose(map_from_kraus_pairs(reduction_kraus_pairs(d)).superop, red.superop)


def test_hermiticity_and_positivity_flags():
    assert hermiticity_preserving(builtin_maps("transpose", 2))
    assert hermiticity_preserving(reduction_map(3))
    assert not completely_positive(builtin_maps("transpose", 2))
    assert completely_positive(builtin_maps("identity", 2))
    u = np.array([[1, 1j], [0, 1]])
    skew = LinearMap(np.kron(u, np.eye(2)), (2, 2), (2, 2))  # X -> u X, not hermiticity-preserving
    assert not hermiticity_preserving(skew)


def test_trace_preserving_flags():
    assert trace_preserving(builtin_maps("transpose", 3))
    assert trace_preserving(builtin_maps("partial_transpose", (2, 2)))
    # Tr(X) I - X scales the trace by d - 1, so it is trace-preserving only for d = 2
    assert trace_preserving(builtin_maps("partial_reduction", (2, 2)))
    assert not trace_preserving(builtin_maps("partial_reduction", (2, 3)))


def test_choi_of_identity_is_unnormalized_max_entangled():
    c = choi_matrix(builtin_maps("identity", 2))
    phi = np.eye(2).reshape(-1)
    assert np.allclose(c, np.outer(phi, phi))


def test_compose():
    t = builtin_maps("transpose", 2)
    assert np.allclose(compose(t, t).superop, np.eye(4))
    with pytest.raises(ValueError):
        compose(t, builtin_maps("transpose", 3))


@given(seeds, st.sampled_from([(2, 2), (2, 3)]))
def test_pair_product_gives_r_r_dagger(seed, dims):
    rng = np.random.default_rng(seed)
    n = dims[0] * dims[1]
    r = builtin_maps("realignment", dims)
    rho = rand_density(rng, n)
    lr = pair_product_map(r)
    out = apply(lr, np.kron(rho, rho))
    rr = realign(rho, dims)
    assert np.allclose(out, rr @ rr.conj().T, atol=1e-12)


def test_pair_product_on_products_of_matrices():
    rng = np.random.default_rng(8)
    r = rand_kraus_map(rng, 2)
    x, y = rand_complex(rng, 2, 2), rand_complex(rng, 2, 2)
    out = apply(pair_product_map(r), np.kron(x, y))
    assert np.allclose(out, apply(r, x) @ apply(primed_map(r), y), atol=1e-12)


def test_kraus_validation():
    with pytest.raises(ValueError):
        KrausPairDecomposition((1.0,), ())
    with pytest.raises(ValueError):
        KrausPairDecomposition((1.0, 2.0), (np.eye(2),))
    with pytest.raises(ValueError):
        KrausPairDecomposition((1.0, 1.0), (np.eye(2), np.eye(3)))


def test_apply_shape_checked():
    with pytest.raises(ValueError):
        apply(builtin_maps("transpose", 2), np.eye(3))


def test_linear_map_is_immutable():
    m = builtin_maps("transpose", 2)
    with pytest.raises(ValueError):
        m.superop[0, 0] = 2
