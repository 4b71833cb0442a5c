"""Collective observables whose k-copy means are the power sums of Θ(ρ).

For a map Θ with dual Θ† the observable on ``k`` copies is

    O_k = herm( (Θ†)^{⊗k} [ (V_k + V_k^dagger) / 2 ] )

where ``V_k`` is the cyclic shift of the k tensor slots. Moving the dual
onto the permutation operator gives ``Tr[O_k ρ^{⊗k}] = Tr[Θ(ρ)^k]``. The
operator itself is what gets measured; no trace is taken over it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .config import limits
from .errors import MapnetError, SizeCapError
from .linmaps import LinearMap, apply, dual_map, hermiticity_preserving
from .tensor import DensityMatrix, cyclic_permutation_operator, hermitian_eig, hermitian_part, tensor_power


class OffContractWarning(UserWarning):
    """A map outside the hermiticity-preserving class was used."""


@dataclass(eq=False)
class Observable:
    mat: np.ndarray
    copies: int = 1
    source: LinearMap | None = field(default=None, repr=False)
    off_contract: bool = False

    @classmethod
    def from_matrix(cls, mat, tol: float = 1e-9) -> "Observable":
        mat = np.asarray(mat, dtype=complex)
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > tol:
            raise ValueError("observable must be Hermitian")
        return cls(hermitian_part(mat))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @cached_property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached exact eigendecomposition (ascending, reproducible basis)."""
        return hermitian_eig(self.mat)

    @property
    def a_min(self) -> float:
        return float(self.eig[0][0])

    @property
    def a_max(self) -> float:
        return float(self.eig[0][-1])

    def mean(self, sigma: np.ndarray) -> float:
        return float(np.real(np.einsum("ij,ji->", self.mat, sigma)))


def spectrum_bounds(o: Observable) -> tuple[float, float]:
    return o.a_min, o.a_max


def apply_per_slot(m: LinearMap, w: np.ndarray, k: int) -> np.ndarray:
    """Apply ``m`` independently to each of the ``k`` tensor slots of ``w``."""
    p, q = m.src_shape
    a, b = m.dst_shape
    t = np.asarray(w).reshape((p,) * k + (q,) * k)
    mt = m.tensor()
    for s in range(k):
        t = np.tensordot(t, mt, axes=([s, k + s], [2, 3]))
        t = np.moveaxis(t, [-2, -1], [s, k + s])
    return t.reshape(a**k, b**k)


def symmetrized_shift(m: int, k: int) -> np.ndarray:
    v = cyclic_permutation_operator(m, k)
    return (v + v.T) / 2  # real permutation matrix: dagger is transpose


def collective_observable(theta: LinearMap, k: int) -> Observable:
    """Observable on ``k`` copies whose mean on ``ρ^{⊗k}`` is ``Tr[Θ(ρ)^k]``.

    Cached per ``(theta, k)``; raises :class:`SizeCapError` when the
    observable or the k-copy output space exceeds ``network_cap``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not theta.square_output:
        raise MapnetError(f"{theta.name} has non-square output {theta.dst_shape}")
    cap = limits().network_cap
    n = theta.src_dim
    for dim, what in ((n**k, "observable"), (theta.dst_rows**k, "k-copy output space")):
        if dim > cap:
            raise SizeCapError(f"{what} for k={k} has dimension {dim}, above network cap {cap}")
    return _collective_observable(theta, k)


@lru_cache(maxsize=256)
def _collective_observable(theta: LinearMap, k: int) -> Observable:
    w = symmetrized_shift(theta.dst_rows, k)
    raw = apply_per_slot(dual_map(theta), w, k)
    hp = hermiticity_preserving(theta)
    if not hp:
        warnings.warn(f"{theta.name} is not hermiticity-preserving; observable mean is Re Tr[Θ(ρ)^k]",
                      OffContractWarning, stacklevel=3)
    mat = hermitian_part(raw)
    mat.setflags(write=False)
    return Observable(mat, copies=k, source=theta, off_contract=not hp)


def _state_matrix(rho) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)


def moment_exact(theta: LinearMap, rho, k: int) -> float:
    """``Tr[Θ(ρ)^k]`` by direct matrix powers."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    out = apply(theta, _state_matrix(rho))
    if out.shape[0] != out.shape[1]:
        raise MapnetError(f"{theta.name} output {out.shape} is not square")
    val = np.trace(np.linalg.matrix_power(out, k))
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        warnings.warn(f"moment k={k} has imaginary part {val.imag:.3e}; returning real part",
                      OffContractWarning, stacklevel=2)
    return float(val.real)


def moment_via_observable(theta: LinearMap, rho, k: int) -> float:
    o = collective_observable(theta, k)
    return o.mean(tensor_power(_state_matrix(rho), k))


@dataclass(frozen=True)
class MomentVector:
    """Power sums ``values[i] = α_{i+1}`` with per-moment standard errors."""

    values: tuple[float, ...]
    std_errors: tuple[float, ...] = ()
    source: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        errs = tuple(float(e) for e in self.std_errors) or (0.0,) * len(vals)
        if len(errs) != len(vals):
            raise ValueError("std_errors must match values")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "std_errors", errs)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def exact(cls, theta: LinearMap, rho, kmax: int) -> "MomentVector":
        return cls(tuple(moment_exact(theta, rho, k) for k in range(1, kmax + 1)), source=theta.name)
