"""Temporal attention scores, the additive reweighting matrix, and the
motion-adaptive reweighting pipeline.

Logits are pre-softmax frame-to-frame scores (any key-dimension scaling is
assumed already applied by the producer).  The pipeline softmaxes them,
estimates a per-frame motion intensity from the windowed spectrum of each
attention row, writes -alpha * (1 - rho_i) onto the diagonal of a corner
penalty matrix, and re-softmaxes the shifted logits.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil

import numpy as np

from .errors import ValidationError
from .spectral import Window, dstft_bins, pad_periodic


@dataclass(frozen=True)
class ReweightMatrix:
    """Additive pre-softmax penalty: non-positive entries on the diagonal
    and in the two anti-diagonal corner triangles, zero elsewhere."""

    matrix: np.ndarray
    alpha: float
    corner_size: int
    corner_penalty: float


@dataclass(frozen=True)
class MotionProfile:
    """Per-frame motion intensities and the band that produced them."""

    rho: np.ndarray
    phi1: int
    phi2: int
    window: Window


@dataclass(frozen=True)
class TiaraResult:
    outputs: np.ndarray
    attention: np.ndarray
    rho: np.ndarray


def as_logits(scores) -> np.ndarray:
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
        raise ValidationError(f"logits must be a square matrix, got shape {scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise ValidationError("logits must be finite")
    return scores


def softmax_rows(logits) -> np.ndarray:
    """Row-wise softmax with max-subtraction for stability."""
    scores = np.asarray(logits, dtype=float)
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def reweighted_attention(logits, penalty, values):
    """Apply an additive penalty before the softmax.

    Returns ``(attention, output)`` where ``attention`` is the row-softmax
    of ``logits + penalty`` and ``output = attention @ values``.  A zero
    penalty reproduces plain attention exactly.
    """
    logits = as_logits(logits)
    n = logits.shape[0]
    lam = penalty.matrix if isinstance(penalty, ReweightMatrix) else np.asarray(penalty, dtype=float)
    if lam.shape != logits.shape:
        raise ValidationError(f"penalty shape {lam.shape} does not match logits shape {logits.shape}")
    values = np.asarray(values, dtype=float)
    if values.shape[0] != n:
        raise ValidationError(
            f"values shape {values.shape} does not match frame count {n}")
    attention = softmax_rows(logits + lam)
    return attention, attention @ values


def row_spectrum(row, window: Window, i: int) -> np.ndarray:
    """One-sided magnitude spectrum of an attention row around frame i.

    The row's mean is removed (the static level carries no motion), the
    deviation is padded periodically by L//2 on each side, and the windowed
    transform is taken at the padded position of sample i.  Returned
    magnitudes cover frequency indices 0 .. floor(Npad/2) of the padded
    transform.
    """
    row = np.asarray(row, dtype=float)
    n = len(row)
    if not 0 <= i < n:
        raise ValidationError(f"row index {i} out of range [0, {n})")
    half = window.half
    padded = pad_periodic(row - row.mean(), half, half)
    npad = n + 2 * half
    ks = np.arange(npad // 2 + 1)
    return np.abs(dstft_bins(padded, window, i + half, ks))


def motion_intensity(row, window: Window, i: int, phi1: int | None = None,
                     phi2: int | None = None) -> float:
    """Fraction of a row's windowed spectral power in the high band.

    The power ratio sum_{phi1 <= k < phi2} / sum_{k < phi2} is taken over
    the one-sided spectrum of the padded row (length Npad = N + 2*(L//2)),
    so 0 <= phi1 < phi2 <= Npad//2 + 1.  Defaults: phi1 = ceil(Npad/8),
    phi2 = Npad//2 + 1.  Rows with zero variation have no motion by
    definition and return 0.0 exactly, as does a vanishing spectrum.
    """
    row = np.asarray(row, dtype=float)
    n = len(row)
    if not 0 <= i < n:
        raise ValidationError(f"row index {i} out of range [0, {n})")
    npad = n + 2 * window.half
    if phi1 is None:
        phi1 = ceil(npad / 8)
    if phi2 is None:
        phi2 = npad // 2 + 1
    if not (isinstance(phi1, (int, np.integer)) and isinstance(phi2, (int, np.integer))):
        raise ValidationError("phi1 and phi2 must be integers")
    if not 0 <= phi1 < phi2 <= npad // 2 + 1:
        raise ValidationError(
            f"thresholds must satisfy 0 <= phi1 < phi2 <= {npad // 2 + 1}, got ({phi1}, {phi2})")
    if row.max() == row.min():
        return 0.0
    power = row_spectrum(row, window, i)[:phi2] ** 2
    denominator = power.sum()
    if denominator == 0.0:
        return 0.0
    return float(power[phi1:].sum() / denominator)


def motion_profile(attention_map, window: Window, phi1: int | None = None,
                   phi2: int | None = None) -> MotionProfile:
    """Motion intensity of every row of an attention map (row i at shift i)."""
    a = np.asarray(attention_map, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"attention map must be square, got shape {a.shape}")
    n = a.shape[0]
    npad = n + 2 * window.half
    resolved1 = ceil(npad / 8) if phi1 is None else phi1
    resolved2 = npad // 2 + 1 if phi2 is None else phi2
    rho = np.array([motion_intensity(a[i], window, i, resolved1, resolved2) for i in range(n)])
    return MotionProfile(rho=rho, phi1=resolved1, phi2=resolved2, window=window)


def build_reweight_matrix(rho, alpha: float, corner_size: int,
                          corner_penalty: float) -> ReweightMatrix:
    """Assemble the penalty matrix: diagonal entry i is -alpha * (1 - rho_i),
    and the c-sized upper-right / lower-left corner triangles get -beta."""
    rho = np.asarray(getattr(rho, "rho", rho), dtype=float)
    if rho.ndim != 1:
        raise ValidationError("rho must be a 1-D sequence")
    if np.any(rho < 0) or np.any(rho > 1):
        raise ValidationError("motion intensities must lie in [0, 1]")
    if alpha < 0 or corner_penalty < 0:
        raise ValidationError("alpha and corner_penalty must be >= 0")
    n = len(rho)
    if not 0 <= corner_size <= n // 2:
        raise ValidationError(f"corner_size must lie in [0, {n // 2}], got {corner_size}")
    lam = np.zeros((n, n))
    if corner_size > 0:
        i, j = np.indices((n, n))
        corner = (i + (n - 1 - j) < corner_size) | ((n - 1 - i) + j < corner_size)
        lam[corner] = -corner_penalty
    lam[np.arange(n), np.arange(n)] = -alpha * (1.0 - rho)
    return ReweightMatrix(matrix=lam, alpha=float(alpha), corner_size=int(corner_size),
                          corner_penalty=float(corner_penalty))


def _worker_count() -> int:
    raw = os.environ.get("TIARA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def tiara(logits_field, values_field, window: Window, phi1: int | None = None,
          phi2: int | None = None, alpha: float = 6.0, corner_size: int | None = None,
          corner_penalty: float | None = None) -> TiaraResult:
    """Motion-adaptive attention reweighting over a spatial field.

    ``logits_field`` has shape (H, W, N, N) and ``values_field``
    (H, W, N, d_v).  For each spatial location the plain attention map is
    formed, per-row motion intensities set the diagonal of the penalty on
    top of the corner base matrix, and the output is the re-softmaxed
    attention applied to the values.  Locations are independent; the loop
    parallelises across TIARA_THREADS threads.

    ``corner_size`` defaults to N//4 and ``corner_penalty`` to alpha/2.
    With alpha = 0 and corner_penalty = 0 the output equals plain attention.
    """
    logits_field = np.asarray(logits_field, dtype=float)
    values_field = np.asarray(values_field, dtype=float)
    if logits_field.ndim != 4 or logits_field.shape[2] != logits_field.shape[3]:
        raise ValidationError(f"logits field must have shape (H, W, N, N), got {logits_field.shape}")
    if values_field.ndim != 4 or values_field.shape[:3] != logits_field.shape[:3]:
        raise ValidationError(
            f"values field shape {values_field.shape} does not match logits field {logits_field.shape}")
    h, w_dim, n = logits_field.shape[:3]
    if corner_size is None:
        corner_size = n // 4
    if corner_penalty is None:
        corner_penalty = alpha / 2.0

    outputs = np.empty_like(values_field)
    attention = np.empty_like(logits_field)
    rho_field = np.empty((h, w_dim, n))

    def process(hw):
        hi, wi = hw
        logits = logits_field[hi, wi]
        profile = motion_profile(softmax_rows(logits), window, phi1, phi2)
        penalty = build_reweight_matrix(profile, alpha, corner_size, corner_penalty)
        a_new, out = reweighted_attention(logits, penalty, values_field[hi, wi])
        outputs[hi, wi] = out
        attention[hi, wi] = a_new
        rho_field[hi, wi] = profile.rho

    locations = [(hi, wi) for hi in range(h) for wi in range(w_dim)]
    workers = _worker_count()
    if workers > 1 and len(locations) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(process, locations))
    else:
        for loc in locations:
            process(loc)
    return TiaraResult(outputs=outputs, attention=attention, rho=rho_field)
