"""Linear maps on operator spaces, stored as superoperators.

A map sending ``n x n`` matrices (or, for duals of rectangular maps,
``r x c`` matrices) to ``p x q`` matrices is held as a ``(p*q) x (r*c)``
matrix acting on row-major vectorizations: ``vec(X) = X.reshape(-1)``.
Under that convention ``X -> K X K^dagger`` has superoperator
``kron(K, K.conj())``.

Pair-product convention
-----------------------
For a map ``R`` the product map ``L_R`` acts on operators of ``H ⊗ H`` and
is defined on product inputs by *multiplying* the two outputs,
``L_R(X ⊗ Y) = R(X) @ R'(Y)`` with ``R' = T ∘ R* ∘ T``. Then
``L_R(rho ⊗ rho) = R(rho) R(rho)^dagger`` and the power sums of ``L_R(rho ⊗ rho)``
are ``Tr[(R(rho) R(rho)^dagger)^k]``. Reading ``R ⊗ R'`` as a tensor product of
outputs would instead give ``|Tr R(rho)^k|^2``, which is not what the
trace-norm test needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .errors import MapnetError


@dataclass(frozen=True)
class KrausPairDecomposition:
    """``X -> sum_j eta_j K_j X K_j^dagger`` with real weights."""

    eta: tuple[float, ...]
    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.ops)
        eta = tuple(float(e) for e in self.eta)
        if not ops:
            raise ValueError("need at least one Kraus pair")
        if len(eta) != len(ops):
            raise ValueError(f"{len(eta)} weights for {len(ops)} operators")
        shape = ops[0].shape
        for k in ops:
            if k.ndim != 2 or k.shape != shape:
                raise ValueError(f"Kraus operators must share one shape, got {k.shape} and {shape}")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "eta", eta)

    def superop(self) -> np.ndarray:
        return sum(e * np.kron(k, k.conj()) for e, k in zip(self.eta, self.ops))


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Immutable linear map between matrix spaces.

    Instances hash by identity, which lets expensive derived objects
    (observables, networks) be cached per map.
    """

    superop: np.ndarray
    src_shape: tuple[int, int]
    dst_shape: tuple[int, int]
    name: str = "map"
    kraus: KrausPairDecomposition | None = field(default=None, repr=False)

    def __post_init__(self):
        s = np.array(self.superop, dtype=complex)
        src = tuple(int(x) for x in self.src_shape)
        dst = tuple(int(x) for x in self.dst_shape)
        if s.shape != (dst[0] * dst[1], src[0] * src[1]):
            raise ValueError(f"superoperator shape {s.shape} does not match {src} -> {dst}")
        s.setflags(write=False)
        object.__setattr__(self, "superop", s)
        object.__setattr__(self, "src_shape", src)
        object.__setattr__(self, "dst_shape", dst)

    @property
    def src_dim(self) -> int:
        if self.src_shape[0] != self.src_shape[1]:
            raise ValueError(f"{self.name} has a rectangular source {self.src_shape}")
        return self.src_shape[0]

    @property
    def dst_rows(self) -> int:
        return self.dst_shape[0]

    @property
    def dst_cols(self) -> int:
        return self.dst_shape[1]

    @property
    def square_output(self) -> bool:
        return self.dst_shape[0] == self.dst_shape[1]

    def tensor(self) -> np.ndarray:
        """Superoperator as a rank-4 tensor ``S[a, b, i, j]``: ``out[a,b] = sum S[a,b,i,j] X[i,j]``."""
        return self.superop.reshape(*self.dst_shape, *self.src_shape)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return apply(self, x)


def _from_tensor(t: np.ndarray, name: str) -> LinearMap:
    a, b, i, j = t.shape
    return LinearMap(t.reshape(a * b, i * j), (i, j), (a, b), name=name)


def apply(m: LinearMap, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != m.src_shape:
        raise ValueError(f"{m.name} acts on {m.src_shape} matrices, got {x.shape}")
    return (m.superop @ x.reshape(-1)).reshape(m.dst_shape)


def map_from_kraus_pairs(d: KrausPairDecomposition, name: str = "kraus") -> LinearMap:
    r, n = d.ops[0].shape
    return LinearMap(d.superop(), (n, n), (r, r), name=name, kraus=d)


def choi_matrix(m: LinearMap) -> np.ndarray:
    """``sum_ij |i><j| ⊗ M(|i><j|)`` for a map with square source."""
    n = m.src_dim
    t = m.tensor()  # [a, b, i, j]
    # choi[(i,a),(j,b)] = M(|i><j|)[a,b]
    return t.transpose(2, 0, 3, 1).reshape(n * m.dst_rows, n * m.dst_cols)


def hermiticity_preserving(m: LinearMap, tol: float = 1e-10) -> bool:
    if not m.square_output or m.src_shape[0] != m.src_shape[1]:
        return False
    c = choi_matrix(m)
    return bool(np.max(np.abs(c - c.conj().T), initial=0.0) <= tol)


def completely_positive(m: LinearMap, tol: float = 1e-10) -> bool:
    """Diagnostic only: Choi matrix Hermitian and PSD."""
    if not hermiticity_preserving(m, tol):
        return False
    c = choi_matrix(m)
    return bool(np.linalg.eigvalsh((c + c.conj().T) / 2)[0] >= -tol)


def dual_map(m: LinearMap) -> LinearMap:
    """Map ``N`` with ``Tr[Y M(X)] = Tr[N(Y) X]`` (bilinear trace pairing).

    For ``M(X) = K X K^dagger`` this is ``N(Y) = K^dagger Y K``. ``N`` takes
    ``q x p`` inputs when ``M`` outputs ``p x q`` matrices.
    """
    # N(Y)[j,i] = sum_ab S[a,b,i,j] Y[b,a]
    return _from_tensor(m.tensor().transpose(3, 2, 1, 0), f"dual({m.name})")


def conjugate_map(m: LinearMap) -> LinearMap:
    """Entrywise complex conjugate of the map's coefficients: ``X -> conj(M(conj X))``."""
    return LinearMap(m.superop.conj(), m.src_shape, m.dst_shape, name=f"conj({m.name})")


def primed_map(m: LinearMap) -> LinearMap:
    """``T ∘ M* ∘ T``, which returns ``M(X)^dagger`` on Hermitian ``X``.

    In general ``primed_map(M)(X) = M(X^dagger)^dagger``.
    """
    # R'(X)[b,a] = sum conj(S[a,b,i,j]) X[j,i]
    return _from_tensor(m.tensor().conj().transpose(1, 0, 3, 2), f"primed({m.name})")


def compose(outer: LinearMap, inner: LinearMap) -> LinearMap:
    if outer.src_shape != inner.dst_shape:
        raise ValueError(f"cannot compose {outer.src_shape} source with {inner.dst_shape} output")
    return LinearMap(outer.superop @ inner.superop, inner.src_shape, outer.dst_shape,
                     name=f"{outer.name}∘{inner.name}")


def extend_with_identity(lam: LinearMap, da: int) -> LinearMap:
    """``I_A ⊗ Λ`` acting on ``(da*n) x (da*n)`` matrices."""
    n = lam.src_dim
    p, q = lam.dst_shape
    eye = np.eye(da)
    # out[(a,p),(c,q)] = sum_bd L[p,q,b,d] X[(a,b),(c,d)]
    t = np.einsum("ix,jy,pqbd->ipjqxbyd", eye, eye, lam.tensor())
    return LinearMap(t.reshape(da * p * da * q, da * n * da * n), (da * n, da * n), (da * p, da * q),
                     name=f"I{da}⊗{lam.name}")


def pair_product_map(r: LinearMap) -> LinearMap:
    """Product map ``L_R`` with ``L_R(X ⊗ Y) = R(X) @ R'(Y)`` (see module notes)."""
    n = r.src_dim
    rows = r.dst_rows
    s = r.tensor()  # [a, b, i, j]
    sp = primed_map(r).tensor()  # [b, e, k, l]
    # out[a,e] from input[(i,k),(j,l)]
    t = np.einsum("abij,bekl->aeikjl", s, sp)
    return LinearMap(t.reshape(rows * rows, n**4), (n * n, n * n), (rows, rows), name=f"L[{r.name}]")


def trace_preserving(m: LinearMap, tol: float = 1e-10) -> bool:
    """True when the dual sends the identity to the identity."""
    if not m.square_output or m.src_shape[0] != m.src_shape[1]:
        return False
    d = dual_map(m)
    out = apply(d, np.eye(m.dst_rows))
    return bool(np.max(np.abs(out - np.eye(m.src_dim))) <= tol)


# -- built-in maps -----------------------------------------------------------

def identity_map(d: int) -> LinearMap:
    return LinearMap(np.eye(d * d), (d, d), (d, d), name="identity")


def transpose_map(d: int) -> LinearMap:
    t = np.einsum("aj,bi->abij", np.eye(d), np.eye(d))
    return _from_tensor(t, "transpose")


def reduction_map(d: int) -> LinearMap:
    """``X -> Tr(X) I - X``."""
    eye = np.eye(d)
    t = np.einsum("ab,ij->abij", eye, eye) - np.einsum("ai,bj->abij", eye, eye)
    return _from_tensor(t, "reduction")


def reduction_kraus_pairs(d: int) -> KrausPairDecomposition:
    """Kraus-pair form of the reduction map: ``sum_ij |i><j| X |j><i| - X``."""
    ops, eta = [], []
    for i, j in product(range(d), repeat=2):
        k = np.zeros((d, d))
        k[i, j] = 1.0
        ops.append(k)
        eta.append(1.0)
    ops.append(np.eye(d))
    eta.append(-1.0)
    return KrausPairDecomposition(tuple(eta), tuple(ops))


def index_permutation_map(perm: Sequence[int], dims: Sequence[int]) -> LinearMap:
    """Permute the four composite indices ``(iA, iB, jA, jB)`` of a bipartite operator.

    ``perm`` lists which input index lands in each output slot; the first
    two output slots form the row index. ``(0, 2, 1, 3)`` is realignment,
    ``(0, 3, 2, 1)`` the partial transpose on B.
    """
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"{perm} is not a permutation of four indices")
    da, db = (int(x) for x in dims)
    n = da * db
    sizes = (da, db, da, db)
    out = tuple(sizes[p] for p in perm)
    rows, cols = out[0] * out[1], out[2] * out[3]
    src = np.arange(n * n).reshape(sizes).transpose(perm).reshape(-1)
    s = np.zeros((rows * cols, n * n))
    s[np.arange(rows * cols), src] = 1.0
    return LinearMap(s, (n, n), (rows, cols), name=f"perm{perm}")


def realignment_map(dims: Sequence[int]) -> LinearMap:
    m = index_permutation_map((0, 2, 1, 3), dims)
    return LinearMap(m.superop, m.src_shape, m.dst_shape, name="realignment")


@lru_cache(maxsize=None)
def _builtin(name: str, dims: tuple[int, ...], perm: tuple[int, ...] | None) -> LinearMap:
    if name == "identity":
        return identity_map(int(np.prod(dims)))
    if name == "transpose":
        return transpose_map(int(np.prod(dims)))
    if name == "reduction":
        return reduction_map(int(np.prod(dims)))
    if name == "realignment":
        return realignment_map(dims)
    if name == "index_permutation":
        if perm is None:
            raise ValueError("index_permutation needs a permutation")
        return index_permutation_map(perm, dims)
    if name == "partial_transpose":
        return extend_with_identity(transpose_map(dims[1]), dims[0])
    if name == "partial_reduction":
        return extend_with_identity(reduction_map(dims[1]), dims[0])
    raise UnknownMapError(f"unknown map {name!r}")


class UnknownMapError(MapnetError, ValueError):
    pass


def builtin_maps(name: str, dims, perm: Sequence[int] | None = None) -> LinearMap:
    """Named map at the requested dimensions (cached; same object per arguments).

    ``transpose``, ``reduction`` and ``identity`` act on a single system of
    dimension ``prod(dims)``; ``realignment``, ``index_permutation``,
    ``partial_transpose`` and ``partial_reduction`` need ``dims = [dA, dB]``.
    """
    dims = (int(dims),) if np.isscalar(dims) else tuple(int(d) for d in dims)
    return _builtin(name, dims, None if perm is None else tuple(int(p) for p in perm))
