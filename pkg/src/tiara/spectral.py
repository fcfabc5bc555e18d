"""Discrete Fourier and short-time Fourier transforms with window functions.

A signal is a 1-D array of finite floats, indexed periodically: sample n
means sample n mod N everywhere in this module.  Transforms are direct
O(N) summations per coefficient; at the few hundred samples this toolkit
works with, correctness and bit-stable results matter more than FFT speed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

WINDOW_KINDS = ("rectangular", "hann", "gaussian", "blackman")

GAUSSIAN_SIGMA = 0.4


@dataclass(frozen=True)
class Window:
    """A sampled window function.

    Coefficient j multiplies sample m + j - L//2 when the window is placed
    at shift m, i.e. the window is centred on m.
    """

    kind: str
    coefficients: np.ndarray

    @property
    def length(self) -> int:
        return len(self.coefficients)

    @property
    def half(self) -> int:
        return len(self.coefficients) // 2


@dataclass(frozen=True)
class Spectrogram:
    """Complex short-time coefficients indexed by (shift m, frequency k)."""

    coefficients: np.ndarray
    signal_length: int
    window: Window


def as_signal(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValidationError(f"signal must be a 1-D sequence of length >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("signal values must all be finite")
    return x


def make_window(kind: str, length: int) -> Window:
    """Build a window of the given kind and length.

    Closed forms (length L, index j): rectangular 1; Hann
    0.5 - 0.5 cos(2 pi j / (L-1)); Blackman 0.42 - 0.5 cos(2 pi j / (L-1))
    + 0.08 cos(4 pi j / (L-1)); Gaussian exp(-((j - (L-1)/2) / (sigma (L-1)/2))^2 / 2)
    with sigma = 0.4.  L = 1 degenerates to [1] for every kind.  Windows are
    symmetrised exactly (coeff[j] == coeff[L-1-j] bit-for-bit) and clipped
    to [0, 1] to absorb sign noise at endpoints that are zero analytically.
    """
    if kind not in WINDOW_KINDS:
        raise ValidationError(f"unknown window kind {kind!r}; expected one of {WINDOW_KINDS}")
    if not isinstance(length, (int, np.integer)) or length < 1:
        raise ValidationError(f"window length must be an integer >= 1, got {length!r}")
    length = int(length)
    if length == 1 or kind == "rectangular":
        coeffs = np.ones(length)
    else:
        j = np.arange((length + 1) // 2, dtype=float)
        if kind == "hann":
            half = 0.5 - 0.5 * np.cos(2.0 * np.pi * j / (length - 1))
        elif kind == "blackman":
            half = (0.42 - 0.5 * np.cos(2.0 * np.pi * j / (length - 1))
                    + 0.08 * np.cos(4.0 * np.pi * j / (length - 1)))
        else:  # gaussian
            centre = (length - 1) / 2.0
            half = np.exp(-0.5 * ((j - centre) / (GAUSSIAN_SIGMA * (length - 1) / 2.0)) ** 2)
        half = np.clip(half, 0.0, 1.0)
        coeffs = np.concatenate([half, half[: length // 2][::-1]])
    coeffs.setflags(write=False)
    return Window(kind=kind, coefficients=coeffs)


def _check_frequency(k, n: int) -> int:
    if not isinstance(k, (int, np.integer)):
        raise ValidationError(f"frequency index must be an integer, got {k!r}")
    if not 0 <= k < n:
        raise ValidationError(f"frequency index {k} out of range [0, {n})")
    return int(k)


def dft(x, k: int) -> complex:
    """DFT coefficient sum_n x_n exp(-2i pi k n / N) for 0 <= k < N."""
    x = as_signal(x)
    n = len(x)
    k = _check_frequency(k, n)
    return complex(np.sum(x * np.exp(-2j * np.pi * k * np.arange(n) / n)))


def dstft_bins(x: np.ndarray, w: Window, m: int, ks: np.ndarray) -> np.ndarray:
    """Windowed transform at shift m for a vector of frequency indices.

    The sum runs over the window support; sample positions m + j - L//2 and
    the complex exponential are both taken N-periodically, matching the
    periodic extension used throughout.
    """
    n = len(x)
    pos = m + np.arange(w.length) - w.half
    weighted = w.coefficients * x[pos % n]
    return weighted @ np.exp(-2j * np.pi * np.outer(pos, np.asarray(ks)) / n)


def dstft(x, w: Window, m: int, k: int) -> complex:
    """Short-time coefficient sum_n x_n psi_{n-m} exp(-2i pi k n / N).

    With a rectangular window of length N this equals ``dft(x, k)`` for any
    shift m.  m may be any integer (periodic); k must lie in [0, N).
    """
    x = as_signal(x)
    k = _check_frequency(k, len(x))
    return complex(dstft_bins(x, w, int(m), np.array([k]))[0])


def pad_periodic(x, left: int, right: int) -> np.ndarray:
    """Extend a signal by wrapping: prepend the last ``left`` samples and
    append the first ``right`` (repeating whole periods as needed)."""
    x = as_signal(x)
    if left < 0 or right < 0:
        raise ValidationError("pad counts must be >= 0")
    idx = np.arange(-int(left), len(x) + int(right)) % len(x)
    return x[idx]


def spectrogram(x, w: Window) -> Spectrogram:
    """All N x N short-time coefficients of a signal under one window."""
    x = as_signal(x)
    n = len(x)
    ks = np.arange(n)
    coeffs = np.empty((n, n), dtype=complex)
    for m in range(n):
        coeffs[m] = dstft_bins(x, w, m, ks)
    return Spectrogram(coefficients=coeffs, signal_length=n, window=w)
