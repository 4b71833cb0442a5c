"""Single-qubit readout of an observable's mean.

An observable ``A`` with spectrum in ``[a_min, a_max]`` is turned into the
two-outcome measurement

    V0 = sqrt((a_minus I + A) / a_plus),   V1 = sqrt(I - V0^2),

with ``a_minus = max(0, -a_min)`` and ``a_plus = a_minus + a_max``. The
dilation ``U_A = I_2 ⊗ V0 - i σ_y ⊗ V1`` acts on (control qubit) ⊗ system;
after it, the control qubit reads 0 with probability ``p0 = Tr(V0^2 σ)`` and

    <A>_σ = a_plus * p0 - a_minus = a_plus * (v + 1) / 2 - a_minus,

where ``v = 2 p0 - 1`` is the σ_z mean (visibility) of the control qubit.

In the eigenbasis ``φ_k`` of V0 (ordered by descending eigenvalue) the
dilation is block diagonal: a y-rotation of the control qubit by
``θ_k = 2 arccos(sqrt(λ_k))`` for each basis state ``|k>``, where ``λ_k`` is
the eigenvalue of ``V0^2`` (so ``sqrt(λ_k)`` is the eigenvalue of V0).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateObservableError, InconsistentPovmError, InvalidVisibilityError
from .observables import Observable
from .tensor import SIGMA_Y, SIGMA_Z, hermitian_part

log = logging.getLogger(__name__)

VIS_JITTER = 1e-9


@dataclass(eq=False)
class BinaryPovm:
    V0: np.ndarray
    V1: np.ndarray
    a_minus: float
    a_plus: float
    # eigenbasis shared by V0 and V1, columns ordered by descending V0^2 eigenvalue
    basis: np.ndarray | None = None
    weights: np.ndarray | None = None  # eigenvalues of V0^2 in the same order
    a_min: float | None = None

    @property
    def dim(self) -> int:
        return self.V0.shape[0]

    def completeness_error(self) -> float:
        tot = self.V0.conj().T @ self.V0 + self.V1.conj().T @ self.V1
        return float(np.max(np.abs(tot - np.eye(self.dim))))

    def commutator_error(self) -> float:
        return float(np.max(np.abs(self.V0 @ self.V1 - self.V1 @ self.V0)))


def binary_povm(o: Observable) -> BinaryPovm:
    """Two-outcome measurement whose outcome-0 probability is affine in ``<O>``."""
    a_min, a_max = o.a_min, o.a_max
    a_minus = max(0.0, -a_min)
    a_plus = a_minus + a_max
    if a_plus <= 0:
        raise DegenerateObservableError(
            f"a_plus = {a_plus:g}: observable is a non-positive multiple of the identity")
    w, q = o.eig
    mu = np.clip((a_minus + w) / a_plus, 0.0, 1.0)
    # ascending in w, so reverse for descending V0^2 eigenvalues
    q, mu = q[:, ::-1], mu[::-1]
    v0 = hermitian_part((q * np.sqrt(mu)) @ q.conj().T)
    v1 = hermitian_part((q * np.sqrt(1.0 - mu)) @ q.conj().T)
    return BinaryPovm(v0, v1, float(a_minus), float(a_plus), basis=q, weights=mu, a_min=a_min)


@dataclass(eq=False)
class DilationUnitary:
    povm: BinaryPovm
    uprime: np.ndarray
    lambdas: np.ndarray
    thetas: np.ndarray

    @cached_property
    def U_A(self) -> np.ndarray:
        p = self.povm
        return np.kron(np.eye(2), p.V0) - 1j * np.kron(SIGMA_Y, p.V1)

    @cached_property
    def readout(self) -> np.ndarray:
        """System-side operator whose expectation on σ is the visibility."""
        return _readout_block(self.U_A, self.uprime)

    @property
    def dim(self) -> int:
        return self.povm.dim

    @property
    def a_minus(self) -> float:
        return self.povm.a_minus

    @property
    def a_plus(self) -> float:
        return self.povm.a_plus

    @property
    def a_min(self) -> float | None:
        return self.povm.a_min


def dilation_unitary(p: BinaryPovm, tol: float = 1e-8) -> DilationUnitary:
    err = p.commutator_error()
    if err > tol:
        raise InconsistentPovmError(f"V0 and V1 do not commute (max |[V0,V1]| = {err:.3e})")
    if p.basis is None:
        w, q = np.linalg.eigh(hermitian_part(p.V0 @ p.V0))
        q, mu = q[:, ::-1], np.clip(w[::-1], 0.0, 1.0)
    else:
        q, mu = p.basis, p.weights
    # same angle as 2 arccos(sqrt(mu)), without the precision loss near mu = 1
    thetas = 2.0 * np.arctan2(np.sqrt(1.0 - mu), np.sqrt(mu))
    return DilationUnitary(p, q.conj().T, np.asarray(mu), thetas)


def rotation(theta: float) -> np.ndarray:
    """``cos(θ/2) I - i sin(θ/2) σ_y``."""
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * SIGMA_Y


def controlled_form(d: DilationUnitary) -> list[tuple[int, float]]:
    """``(control basis index k, rotation angle θ_k)`` pairs."""
    return [(k, float(t)) for k, t in enumerate(d.thetas)]


def reassemble(thetas: Sequence[float], uprime: np.ndarray) -> np.ndarray:
    """``U_A`` from the controlled-rotation description.

    Builds ``sum_k R_y(θ_k) ⊗ |k><k|`` and undoes the diagonalizing basis change.
    """
    uprime = np.asarray(uprime)
    n = uprime.shape[0]
    udet = np.zeros((2 * n, 2 * n), dtype=complex)
    for k, t in enumerate(thetas):
        r = rotation(t)
        for a in range(2):
            for b in range(2):
                udet[a * n + k, b * n + k] = r[a, b]
    big = np.kron(np.eye(2), uprime)
    return big.conj().T @ udet @ big


def _readout_block(u_a: np.ndarray, up: np.ndarray) -> np.ndarray:
    # Tr[(Z⊗I) u (P0⊗σ) u†] = Tr[M00 σ] with M = u† (Z⊗I) u and u = (I⊗U')U_A
    n = up.shape[0]
    u = np.kron(np.eye(2), up) @ u_a
    m = u.conj().T @ np.kron(SIGMA_Z, np.eye(n)) @ u
    return m[:n, :n]


def visibility_exact(d: DilationUnitary, sigma: np.ndarray, uprime: np.ndarray | None = None) -> float:
    """σ_z mean of the control qubit after the network acts on ``|0><0| ⊗ σ``.

    ``uprime`` overrides the output-side basis change; it cannot affect the result.
    """
    sigma = np.asarray(sigma)
    if sigma.shape != (d.dim, d.dim):
        raise ValueError(f"network acts on dimension {d.dim}, state has shape {sigma.shape}")
    if uprime is None:
        block = d.readout
    else:
        block = _readout_block(d.U_A, np.asarray(uprime))
    v = np.einsum("ij,ji->", block, sigma)
    if abs(v.imag) > 1e-10:
        raise ValueError(f"visibility has imaginary part {v.imag:.3e}")
    return float(v.real)


def mean_from_visibility(v: float, p) -> float:
    """Affine map from visibility to the observable's mean.

    ``p`` is a :class:`BinaryPovm` or :class:`DilationUnitary`. Visibilities
    within 1e-9 outside ``[-1, 1]`` are clamped.
    """
    if abs(v) > 1 + VIS_JITTER:
        raise InvalidVisibilityError(f"visibility {v!r} outside [-1, 1]")
    if abs(v) > 1:
        if abs(v) - 1 > 1e-12:
            log.warning("clamping visibility %r to [-1, 1]", v)
        v = float(np.clip(v, -1.0, 1.0))
    return p.a_plus * (v + 1) / 2 - p.a_minus


def visibility_interval(c1: float, c2: float, p, a_min: float | None = None,
                        a_max: float | None = None) -> tuple[float, float]:
    """Visibility window equivalent to ``c1 <= <A> <= c2``.

    Spectral bounds default to the ones recorded on ``p``.
    """
    if a_max is None:
        a_max = p.a_plus - p.a_minus
    if a_min is None:
        a_min = getattr(p, "a_min", None)
        a_min = -p.a_minus if a_min is None else a_min
    if c1 > c2:
        raise ValueError(f"c1 = {c1} exceeds c2 = {c2}")
    slack = 1e-12 * max(1.0, abs(a_min), abs(a_max))
    if c1 < a_min - slack or c2 > a_max + slack:
        raise ValueError(f"[{c1}, {c2}] is not inside the spectrum [{a_min}, {a_max}]")
    lo = 2 * (c1 + p.a_minus) / p.a_plus - 1
    hi = 2 * (c2 + p.a_minus) / p.a_plus - 1
    return lo, hi


@dataclass(frozen=True)
class VisibilityEstimate:
    p0_hat: float
    v_hat: float
    shots: int
    std_error: float
    seed: int | tuple[int, ...]


def simulate_shots(p0: float, shots: int, seed) -> VisibilityEstimate:
    """Binomially sampled control-qubit statistics.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts; the same
    ``(p0, shots, seed)`` always gives the same estimate.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if not -1e-9 <= p0 <= 1 + 1e-9:
        raise ValueError(f"p0 = {p0!r} is not a probability")
    p0 = min(max(p0, 0.0), 1.0)
    rng = np.random.default_rng(seed)
    n0 = int(rng.binomial(shots, p0))
    p_hat = n0 / shots
    std = 2.0 * np.sqrt(p_hat * (1 - p_hat) / shots)
    seed_rec = tuple(int(s) for s in seed) if isinstance(seed, (list, tuple)) else seed
    return VisibilityEstimate(p_hat, 2 * p_hat - 1, int(shots), float(std), seed_rec)


@dataclass(eq=False)
class Network:
    """Synthesized readout network for one observable."""

    observable: Observable
    povm: BinaryPovm
    dilation: DilationUnitary

    def visibility(self, sigma: np.ndarray) -> float:
        return visibility_exact(self.dilation, sigma)

    def mean(self, v: float) -> float:
        return mean_from_visibility(v, self.povm)


def synthesize(o: Observable) -> Network:
    p = binary_povm(o)
    return Network(o, p, dilation_unitary(p))
