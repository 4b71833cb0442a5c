"""Dense complex linear algebra for operators on multipartite spaces.

Every multipartite reshape in the package uses the row-major composite-index
convention: for dims ``[d0, d1, ...]`` the basis state ``|i0 i1 ...>`` sits at
index ``(((i0 * d1) + i1) * d2 + ...)``, which is exactly what
``numpy.reshape`` does with C ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .config import limits
from .errors import InvalidStateError, NotHermitianError, NotPSDError, SizeCapError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PSD_CLAMP = 1e-8


def is_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    err = u.conj().T @ u - np.eye(u.shape[0])
    return bool(np.max(np.abs(err), initial=0.0) <= tol)


def is_psd(a: np.ndarray, tol: float = 1e-10) -> bool:
    if not is_hermitian(a, tol):
        return False
    return bool(np.linalg.eigvalsh(hermitian_part(a))[0] >= -tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def tensor_power(a: np.ndarray, k: int) -> np.ndarray:
    """``a ⊗ a ⊗ ... ⊗ a`` with ``k`` factors."""
    if k < 1:
        raise ValueError(f"tensor power needs k >= 1, got {k}")
    return reduce(np.kron, [np.asarray(a)] * k)


def _check_cap(rows: int, cap: int, what: str) -> None:
    if rows > cap:
        raise SizeCapError(f"{what} would have {rows} rows, above the cap of {cap}")


def cyclic_permutation_indices(m: int, k: int) -> np.ndarray:
    """Column index of the single 1 in each row of the cyclic shift.

    The shift sends ``|e1 e2 ... ek>`` to ``|ek e1 ... e(k-1)>``, so row
    ``(f1, ..., fk)`` is hit by column ``(f2, ..., fk, f1)``.
    """
    rows = np.arange(m**k).reshape((m,) * k)
    return np.moveaxis(rows, -1, 0).reshape(-1)


def cyclic_permutation_operator(m: int, k: int, cap: int | None = None) -> np.ndarray:
    """Dense ``m**k`` square permutation matrix of the k-copy cyclic shift."""
    if m < 1 or k < 1:
        raise ValueError(f"need m >= 1 and k >= 1, got m={m}, k={k}")
    cap = limits().size_cap if cap is None else cap
    _check_cap(m**k, cap, f"V^({k}) on C^{m}")
    n = m**k
    v = np.zeros((n, n), dtype=complex)
    v[np.arange(n), cyclic_permutation_indices(m, k)] = 1.0
    return v


def partial_transpose(rho, subsystem: int, dims: Sequence[int] | None = None) -> np.ndarray:
    """Transpose only the tensor factor ``subsystem``.

    ``rho`` may be a :class:`DensityMatrix` (dims taken from it) or a plain
    array together with ``dims``.
    """
    mat, dims = _unpack(rho, dims)
    n = len(dims)
    if not 0 <= subsystem < n:
        raise IndexError(f"subsystem {subsystem} out of range for {n} subsystems")
    t = mat.reshape(tuple(dims) * 2)
    t = np.swapaxes(t, subsystem, subsystem + n)
    return t.reshape(mat.shape)


def realign(rho, dims: Sequence[int] | None = None) -> np.ndarray:
    """Realignment ``R[(i,j),(k,l)] = <i k|rho|j l>``; shape ``dA^2 x dB^2``."""
    mat, dims = _unpack(rho, dims)
    if len(dims) != 2:
        raise ValueError(f"realignment needs exactly two subsystems, got dims={list(dims)}")
    da, db = dims
    return mat.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)


def unrealign(r: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    da, db = dims
    return np.asarray(r).reshape(da, da, db, db).transpose(0, 2, 1, 3).reshape(da * db, da * db)


def _phase_fix(vecs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size:
            c = col[nz[0]]
            vecs[:, j] = col * (abs(c) / c)
    return vecs


def hermitian_eig(a: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with a reproducible basis.

    Eigenvalues ascend. Each eigenvector has its first nonzero component made
    real positive; eigenvectors of (numerically) equal eigenvalues are ordered
    lexicographically by their components.
    """
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a, tol):
        raise NotHermitianError("hermitian_eig needs a Hermitian matrix")
    w, v = np.linalg.eigh(hermitian_part(a))
    v = _phase_fix(v)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    order = list(range(len(w)))
    start = 0
    while start < len(w):
        stop = start + 1
        while stop < len(w) and w[stop] - w[start] <= 1e-10 * scale:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            block.sort(key=lambda j: tuple(
                x for z in np.round(v[:, j], 9) for x in (-z.real, -z.imag)))
            order[start:stop] = block
        start = stop
    return w[order], v[:, order]


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in ``[-1e-8, 0)`` are clamped."""
    a = np.asarray(a, dtype=complex)
    w, v = hermitian_eig(a, tol=PSD_CLAMP)
    if w.size and w[0] < -PSD_CLAMP:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e} below -{PSD_CLAMP:g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return hermitian_part((v * root) @ v.conj().T)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    return (a + a.conj().T) / 2


def trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(a), compute_uv=False)))


def _unpack(rho, dims):
    if isinstance(rho, DensityMatrix):
        return rho.mat, list(rho.dims) if dims is None else list(dims)
    mat = np.asarray(rho)
    if dims is None:
        raise ValueError("dims are required for a bare matrix")
    if int(np.prod(dims)) != mat.shape[0]:
        raise ValueError(f"dims {list(dims)} do not match matrix of size {mat.shape[0]}")
    return mat, list(dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix with subsystem dimensions.

    Construction checks hermiticity (1e-12 by default), unit trace and
    positivity (1e-10); failures raise :class:`InvalidStateError` naming the
    violated property.
    """

    mat: np.ndarray
    dims: tuple[int, ...] = field(default=())
    herm_tol: float = 1e-12
    tol: float = 1e-10

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidStateError("shape", float("nan"), f"density matrix must be square, got {mat.shape}")
        dims = tuple(int(d) for d in self.dims) or (mat.shape[0],)
        if int(np.prod(dims)) != mat.shape[0]:
            raise InvalidStateError("dims", float(np.prod(dims)),
                                    f"dims {list(dims)} do not multiply to {mat.shape[0]}")
        herm = float(np.max(np.abs(mat - mat.conj().T), initial=0.0))
        if herm > self.herm_tol:
            raise InvalidStateError("hermitian", herm)
        tr = abs(np.trace(mat) - 1.0)
        if tr > self.tol:
            raise InvalidStateError("trace", float(tr))
        lo = float(np.linalg.eigvalsh(hermitian_part(mat))[0])
        if lo < -self.tol:
            raise InvalidStateError("psd", lo)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self.mat, other.mat), self.dims + other.dims)
