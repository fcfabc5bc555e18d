"""Inconsistency error, dynamic components, and homogeneity/separation
measurements on signals and attention maps."""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .spectral import Window, as_signal, dstft_bins

KAPPA_TOLERANCE = 1e-12


@dataclass(frozen=True)
class InconsistencyReport:
    """E(x, tau) for every shift tau, under one window and threshold."""

    per_tau: np.ndarray
    k_threshold: int
    window: Window


def _check_threshold(k_t, n: int) -> int:
    if not isinstance(k_t, (int, np.integer)) or not 1 <= k_t <= n // 2:
        raise ValidationError(f"k_threshold must be an integer in [1, {n // 2}], got {k_t!r}")
    return int(k_t)


def inconsistency_error(x, w: Window, tau: int, k_t: int) -> float:
    """Sum of windowed-transform magnitudes over k in [k_t, N//2] at shift tau."""
    x = as_signal(x)
    k_t = _check_threshold(k_t, len(x))
    ks = np.arange(k_t, len(x) // 2 + 1)
    return float(np.abs(dstft_bins(x, w, int(tau), ks)).sum())


def inconsistency_profile(x, w: Window, k_t: int) -> InconsistencyReport:
    x = as_signal(x)
    k_t = _check_threshold(k_t, len(x))
    ks = np.arange(k_t, len(x) // 2 + 1)
    per_tau = np.array([np.abs(dstft_bins(x, w, tau, ks)).sum() for tau in range(len(x))])
    return InconsistencyReport(per_tau=per_tau, k_threshold=k_t, window=w)


def dynamic_component(a) -> np.ndarray:
    """Copy of an attention map with the diagonal zeroed.

    The result is deliberately not row-stochastic: row i sums to
    1 - a[i, i].  It captures the influence of all other frames on frame i.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    out = a.copy()
    np.fill_diagonal(out, 0.0)
    return out


def estimate_kappa(x, x_dyn, w: Window, k_t: int, tol: float = KAPPA_TOLERANCE) -> float:
    """Worst-case high-band magnitude ratio |T(x_dyn)| / |T(x)|.

    The maximum runs over every shift tau in [0, N) and frequency
    k in [k_t, N//2]; positions where |T(x)| < tol are skipped (the
    separation bound is vacuous where x has no power).  Returns 0 if every
    position is skipped.
    """
    x = as_signal(x)
    x_dyn = as_signal(x_dyn)
    if len(x) != len(x_dyn):
        raise ValidationError("x and x_dyn must have the same length")
    n = len(x)
    k_t = _check_threshold(k_t, n)
    ks = np.arange(k_t, n // 2 + 1)
    best = 0.0
    any_kept = False
    for tau in range(n):
        mag_x = np.abs(dstft_bins(x, w, tau, ks))
        mag_d = np.abs(dstft_bins(x_dyn, w, tau, ks))
        keep = mag_x >= tol
        if keep.any():
            any_kept = True
            best = max(best, float((mag_d[keep] / mag_x[keep]).max()))
    return best if any_kept else 0.0


def homogeneity_deviation(a) -> float:
    """Max over i, j, k of |a[i, i+k] - a[j, j+k]| with wrapped indices.

    Zero exactly when the matrix is circulant.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    rows = np.arange(n)
    worst = 0.0
    for k in range(n):
        diag = a[rows, (rows + k) % n]
        worst = max(worst, float(diag.max() - diag.min()))
    return worst
