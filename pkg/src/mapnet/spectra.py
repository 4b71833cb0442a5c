"""Spectrum reconstruction from power sums, and trace norms from γ-moments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidGammaError, ReconstructionError

# Relative coefficient noise assumed for exact (floating point) moments. A
# cluster of s roots is merged when its diameter is below
# CLUSTER_FACTOR * scale * eps**(1/s), the splitting an s-fold root suffers
# under coefficient perturbations of size eps.
EXACT_MOMENT_EPS = 1e-13
CLUSTER_FACTOR = 4.0
SPREAD_RATIO = 0.25


def newton_girard(moments: Sequence[float], m: int) -> np.ndarray:
    """Elementary symmetric polynomials ``e_1..e_m`` from power sums ``α_1..α_m``.

    Uses ``k e_k = sum_{i=1..k} (-1)^(i-1) e_(k-i) α_i`` with ``e_0 = 1``.
    """
    alpha = np.asarray(moments, dtype=float)
    if alpha.shape != (m,):
        raise ValueError(f"need exactly {m} moments, got {alpha.size}")
    e = np.zeros(m + 1)
    e[0] = 1.0
    for k in range(1, m + 1):
        signs = (-1.0) ** np.arange(k)  # (-1)^(i-1) for i = 1..k
        e[k] = np.dot(signs * e[k - 1::-1], alpha[:k]) / k
    return e[1:]


def characteristic_coeffs(e: Sequence[float]) -> np.ndarray:
    """Monic coefficients, highest power first, of ``prod (λ - λ_i)``."""
    e = np.asarray(e, dtype=float)
    signs = (-1.0) ** np.arange(1, e.size + 1)
    return np.concatenate([[1.0], signs * e])


def companion(coeffs: Sequence[float]) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    if c[0] != 1.0:
        c = c / c[0]
    m = c.size - 1
    mat = np.zeros((m, m))
    mat[0, :] = -c[1:]
    mat[np.arange(1, m), np.arange(m - 1)] = 1.0
    return mat


def _root_scale(coeffs: np.ndarray) -> float:
    c = np.abs(coeffs[1:])
    powers = np.arange(1, c.size + 1)
    return max(1.0, float(np.max(c ** (1.0 / powers), initial=0.0)))


def _merge_clusters(roots: np.ndarray, scale: float, eps: float) -> np.ndarray:
    """Replace clusters of split multiple roots by their centroid.

    Larger clusters are tried first; a candidate cluster is a root plus its
    nearest unassigned neighbours. Float noise splits an s-fold root (s >= 3)
    into a near-regular polygon, where ``sum (r - c)^2`` nearly cancels;
    distinct close roots of a Hermitian matrix are real and do not cancel,
    so such candidates are left alone.
    """
    out = roots.astype(complex).copy()
    free = set(range(roots.size))
    for s in range(roots.size, 1, -1):
        limit = CLUSTER_FACTOR * scale * eps ** (1.0 / s)
        for i in sorted(free, key=lambda j: (roots[j].real, roots[j].imag)):
            if i not in free or len(free) < s:
                continue
            cand = sorted(free, key=lambda j: abs(roots[j] - roots[i]))[:s]
            pts = roots[cand]
            diam = np.max(np.abs(pts[:, None] - pts[None, :]))
            if diam > limit:
                continue
            c = pts.mean()
            dev = pts - c
            spread = np.sum(np.abs(dev) ** 2)
            if s >= 3 and abs(np.sum(dev**2)) > SPREAD_RATIO * spread:
                continue
            out[cand] = c
            free.difference_update(cand)
    return out


def roots_real(coeffs: Sequence[float], tol_imag: float = 1e-6,
               cluster_eps: float | None = EXACT_MOMENT_EPS) -> np.ndarray:
    """Real roots of a monic polynomial via companion-matrix eigenvalues.

    ``coeffs`` are ordered highest power first. Roots whose imaginary part is
    within ``tol_imag`` (scaled by the root magnitude bound) are projected
    onto the real axis; anything else raises :class:`ReconstructionError`.
    With ``cluster_eps`` set, split multiple roots are merged first.

    Returns the roots in descending order.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.size < 2:
        return np.zeros(0)
    c = c / c[0]
    roots = np.linalg.eigvals(companion(c))
    scale = _root_scale(c)
    if cluster_eps is not None:
        roots = _merge_clusters(roots, scale, cluster_eps)
    bad = np.abs(roots.imag) > tol_imag * scale
    if np.any(bad):
        raise ReconstructionError(
            f"{int(bad.sum())} roots have imaginary parts above {tol_imag * scale:.2e}", roots=roots)
    return np.sort(roots.real)[::-1]


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    residual: float

    @property
    def min(self) -> float:
        return min(self.eigenvalues)

    def __len__(self) -> int:
        return len(self.eigenvalues)


def power_sums(eigs: Sequence[float], kmax: int) -> np.ndarray:
    lam = np.asarray(eigs, dtype=float)
    return np.array([np.sum(lam**k) for k in range(1, kmax + 1)])


def spectrum_from_moments(moments, m: int, tol_imag: float = 1e-6,
                          cluster_eps: float | None = EXACT_MOMENT_EPS) -> Spectrum:
    """Eigenvalues of an ``m x m`` Hermitian matrix from ``α_1..α_m``.

    ``moments`` may be a sequence of floats or a :class:`MomentVector`.
    """
    alpha = np.asarray(getattr(moments, "values", moments), dtype=float)
    lam = roots_real(characteristic_coeffs(newton_girard(alpha, m)), tol_imag, cluster_eps)
    residual = float(np.max(np.abs(power_sums(lam, m) - alpha), initial=0.0))
    return Spectrum(tuple(float(x) for x in lam), residual)


def trace_norm_from_gammas(gammas: Sequence[float], tol: float = 1e-6) -> float:
    """``sum sqrt(γ_i)`` for the eigenvalues γ of ``R R^dagger``."""
    g = np.asarray(gammas, dtype=float)
    if g.size and g.min() < -tol:
        raise InvalidGammaError(f"gamma {g.min():.3e} is below -{tol:g}")
    return float(np.sum(np.sqrt(np.clip(g, 0.0, None))))
