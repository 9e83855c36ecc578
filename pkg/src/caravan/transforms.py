"""Discrete wavelet transforms via the pyramid algorithm.

Implements the decimated orthonormal DWT (odd decimation, periodic
boundaries), the undecimated maximal-overlap transform (MODWT), the
additive multiresolution analysis, and optional zero-phase alignment of
the per-level coefficient vectors. Conventions follow Percival & Walden,
"Wavelet Methods for Time Series Analysis".
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np

from .filters import QmfFilter, make_filter

__all__ = [
    "TransformKind",
    "WaveletDecomposition",
    "MraDecomposition",
    "dwt_forward",
    "dwt_inverse",
    "modwt_forward",
    "modwt_inverse",
    "inverse_transform",
    "mra",
    "align",
    "unalign",
    "alignment_shifts",
]

_SQRT2 = np.sqrt(2.0)


class TransformKind(str, Enum):
    DWT = "dwt"
    MODWT = "modwt"


@dataclass(frozen=True)
class WaveletDecomposition:
    """Wavelet and scaling coefficients of a finite sequence.

    Attributes
    ----------
    kind : TransformKind
        Decimated (``DWT``) or maximal-overlap (``MODWT``) transform.
    filter : QmfFilter
        The quadrature-mirror pair used by the pyramid.
    levels : int
        Transform depth J0.
    wavelet : list of ndarray
        Detail coefficient vectors ``w_1..w_J0`` (finest first). For the
        DWT level j has ``N / 2**j`` entries; for the MODWT every level
        has N entries.
    scaling : ndarray
        Final-level scaling coefficients ``v_J0``.
    original_length : int
        Length N of the analysed sequence.
    aligned : bool
        Whether the per-level vectors have been zero-phase aligned.
    """

    kind: TransformKind
    filter: QmfFilter
    levels: int
    wavelet: list
    scaling: np.ndarray
    original_length: int
    aligned: bool = False

    def copy(self) -> "WaveletDecomposition":
        return replace(
            self,
            wavelet=[w.copy() for w in self.wavelet],
            scaling=self.scaling.copy(),
        )


@dataclass(frozen=True)
class MraDecomposition:
    """Additive multiresolution analysis: x = sum(details) + smooth."""

    details: list
    smooth: np.ndarray


def _as_signal(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D sequence, got shape {x.shape}")
    return x


# ---------------------------------------------------------------------------
# Decimated DWT
# ---------------------------------------------------------------------------

def _analysis_step(v: np.ndarray, filt: QmfFilter):
    """One filter-and-decimate step; returns (scaling, wavelet) halves.

    Output index t holds the circular convolution evaluated at the odd
    input position 2t+1 (odd decimation).
    """
    half = v.size // 2
    idx = (2 * np.arange(half)[:, None] + 1 - np.arange(filt.length)[None, :]) % v.size
    window = v[idx]
    return window @ filt.lowpass, window @ filt.highpass


def _synthesis_step(v_next: np.ndarray, w_next: np.ndarray, filt: QmfFilter) -> np.ndarray:
    """Adjoint of `_analysis_step`; exact inverse since the step is orthonormal."""
    n_out = 2 * v_next.size
    out = np.zeros(n_out)
    base = 2 * np.arange(v_next.size) + 1
    for tap in range(filt.length):
        pos = (base - tap) % n_out
        out[pos] += filt.lowpass[tap] * v_next + filt.highpass[tap] * w_next
    return out


def dwt_forward(x, filt: QmfFilter, levels: int) -> WaveletDecomposition:
    """Partial discrete wavelet transform of depth `levels`.

    Parameters
    ----------
    x : array_like
        Input sequence of length N, with N an integer multiple of
        ``2**levels``.
    filt : QmfFilter
    levels : int
        Number of pyramid stages J0 >= 1.

    Returns
    -------
    WaveletDecomposition
        Orthonormal decomposition: total coefficient count equals N and
        energy is preserved.
    """
    x = _as_signal(x)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    n = x.size
    if n == 0 or n % (1 << levels) != 0:
        raise ValueError(
            f"input length {n} is not an integer multiple of 2**levels = {1 << levels}"
        )
    v = x
    wavelet = []
    for _ in range(levels):
        v, w = _analysis_step(v, filt)
        wavelet.append(w)
    return WaveletDecomposition(
        kind=TransformKind.DWT,
        filter=filt,
        levels=levels,
        wavelet=wavelet,
        scaling=v,
        original_length=n,
        aligned=False,
    )


def _check_dwt_lengths(d: WaveletDecomposition) -> None:
    n = d.original_length
    if len(d.wavelet) != d.levels:
        raise ValueError(
            f"decomposition claims {d.levels} levels but holds {len(d.wavelet)}"
        )
    for j, w in enumerate(d.wavelet, start=1):
        if w.size != n >> j:
            raise ValueError(
                f"level {j} has {w.size} coefficients, expected {n >> j}"
            )
    if d.scaling.size != n >> d.levels:
        raise ValueError(
            f"scaling vector has {d.scaling.size} coefficients, expected {n >> d.levels}"
        )


def dwt_inverse(d: WaveletDecomposition) -> np.ndarray:
    """Invert a DWT decomposition via the inverse pyramid algorithm."""
    if d.kind is not TransformKind.DWT:
        raise ValueError(f"expected a DWT decomposition, got {d.kind.value}")
    _check_dwt_lengths(d)
    v = d.scaling
    for w in reversed(d.wavelet):
        v = _synthesis_step(v, w, d.filter)
    return v


# ---------------------------------------------------------------------------
# Maximal-overlap DWT
# ---------------------------------------------------------------------------

def _circular_filter(v: np.ndarray, taps: np.ndarray, stride: int) -> np.ndarray:
    """Circular convolution with the stride-upsampled filter (no decimation)."""
    out = taps[0] * v
    for tap in range(1, taps.size):
        out += taps[tap] * np.roll(v, stride * tap)
    return out


def _circular_filter_adjoint(v: np.ndarray, taps: np.ndarray, stride: int) -> np.ndarray:
    out = taps[0] * v
    for tap in range(1, taps.size):
        out += taps[tap] * np.roll(v, -stride * tap)
    return out


def modwt_forward(x, filt: QmfFilter, levels: int) -> WaveletDecomposition:
    """Maximal-overlap DWT: undecimated pyramid with rescaled filters.

    Works for any input length (no dyadic requirement); every level keeps
    N coefficients. Level j filters the previous scaling vector with the
    1/sqrt(2)-rescaled pair upsampled by stride ``2**(j-1)``.
    """
    x = _as_signal(x)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if x.size < 1:
        raise ValueError("input sequence is empty")
    low = filt.lowpass / _SQRT2
    high = filt.highpass / _SQRT2
    v = x
    wavelet = []
    for j in range(1, levels + 1):
        stride = 1 << (j - 1)
        wavelet.append(_circular_filter(v, high, stride))
        v = _circular_filter(v, low, stride)
    return WaveletDecomposition(
        kind=TransformKind.MODWT,
        filter=filt,
        levels=levels,
        wavelet=wavelet,
        scaling=v,
        original_length=x.size,
        aligned=False,
    )


def modwt_inverse(d: WaveletDecomposition) -> np.ndarray:
    """Pyramid synthesis for the MODWT (exact on the forward transform's range)."""
    if d.kind is not TransformKind.MODWT:
        raise ValueError(f"expected a MODWT decomposition, got {d.kind.value}")
    n = d.original_length
    if len(d.wavelet) != d.levels:
        raise ValueError(
            f"decomposition claims {d.levels} levels but holds {len(d.wavelet)}"
        )
    for j, w in enumerate(d.wavelet, start=1):
        if w.size != n:
            raise ValueError(f"level {j} has {w.size} coefficients, expected {n}")
    if d.scaling.size != n:
        raise ValueError(f"scaling vector has {d.scaling.size} coefficients, expected {n}")
    low = d.filter.lowpass / _SQRT2
    high = d.filter.highpass / _SQRT2
    v = d.scaling
    for j in range(d.levels, 0, -1):
        stride = 1 << (j - 1)
        v = _circular_filter_adjoint(v, low, stride) + _circular_filter_adjoint(
            d.wavelet[j - 1], high, stride
        )
    return v


def inverse_transform(d: WaveletDecomposition) -> np.ndarray:
    """Dispatch to `dwt_inverse` or `modwt_inverse` by decomposition kind."""
    if d.kind is TransformKind.DWT:
        return dwt_inverse(d)
    return modwt_inverse(d)


# ---------------------------------------------------------------------------
# Multiresolution analysis
# ---------------------------------------------------------------------------

def mra(d: WaveletDecomposition) -> MraDecomposition:
    """Additive multiresolution analysis of a decomposition.

    Detail ``D_j`` is the synthesis of the decomposition with every vector
    except ``w_j`` zeroed; the smooth is the synthesis of ``v_J0`` alone.
    By linearity the details and the smooth add back to the input.
    """
    if d.aligned:
        raise ValueError("unalign the decomposition before computing an MRA")
    zero_wavelet = [np.zeros_like(w) for w in d.wavelet]
    zero_scaling = np.zeros_like(d.scaling)
    details = []
    for j in range(d.levels):
        only_j = list(zero_wavelet)
        only_j[j] = d.wavelet[j]
        details.append(
            inverse_transform(replace(d, wavelet=only_j, scaling=zero_scaling))
        )
    smooth = inverse_transform(replace(d, wavelet=zero_wavelet))
    return MraDecomposition(details=details, smooth=smooth)


# ---------------------------------------------------------------------------
# Zero-phase alignment
# ---------------------------------------------------------------------------

def _equivalent_filters(filt: QmfFilter, levels: int, n: int):
    """Undecimated level-j equivalent filters on an n-point circular grid.

    Returns the impulse responses of the wavelet cascade at levels
    1..levels plus the scaling cascade at level `levels`. Filter
    normalisation is irrelevant here; only the phase is used.
    """
    v = np.zeros(n)
    v[0] = 1.0
    wavelet_eq = []
    for j in range(1, levels + 1):
        stride = 1 << (j - 1)
        wavelet_eq.append(_circular_filter(v, filt.highpass, stride))
        v = _circular_filter(v, filt.lowpass, stride)
    return wavelet_eq, v


def _zero_phase_advance(eq_filter: np.ndarray) -> int:
    """Integer circular advance making the transfer function closest to real.

    A filter is zero-phase when its transfer function is real at the
    Fourier frequencies; for the nearly-symmetric Daubechies cascades the
    best integer advance minimises the residual imaginary energy
    ``sum_k Im(e^{2 pi i k s / n} F_k)^2`` over shifts s. Ties are broken
    towards the smallest advance magnitude.
    """
    n = eq_filter.size
    spec = np.fft.fft(eq_filter)
    re, im = spec.real, spec.imag
    total = 0.5 * np.sum(re * re + im * im)
    # energy(s) = total + Re T(2s mod n) with T = n * ifft(B)
    b = 0.5 * (im * im - re * re) - 1j * (re * im)
    t = n * np.fft.ifft(b)
    shifts = np.arange(n)
    energy = total + t[(2 * shifts) % n].real
    best = energy.min()
    tied = np.flatnonzero(energy <= best + 1e-9 * abs(best) + 1e-30)
    advances = np.where(tied <= n // 2, tied, tied - n)
    order = np.lexsort((advances, np.abs(advances)))
    return int(advances[order[0]])


@lru_cache(maxsize=64)
def _alignment_shifts_cached(filter_name: str, kind_value: str, levels: int, n: int):
    filt = make_filter(filter_name)
    wavelet_eq, scaling_eq = _equivalent_filters(filt, levels, n)
    advances = [_zero_phase_advance(w) for w in wavelet_eq]
    scaling_advance = _zero_phase_advance(scaling_eq)
    if kind_value == TransformKind.MODWT.value:
        wavelet_shifts = tuple(-adv for adv in advances)
        scaling_shift = -scaling_advance
    else:
        # Map the time-domain advance onto the decimated grid: raw slot k
        # reads the input around time 2^j (k+1) - 1 - advance, and slot m
        # should represent the block centred at 2^j m + (2^j - 1) / 2.
        def slot_shift(advance, j):
            return int(np.round((((1 << j) - 1) / 2.0 - advance) / (1 << j)))

        wavelet_shifts = tuple(
            slot_shift(adv, j) for j, adv in enumerate(advances, start=1)
        )
        scaling_shift = slot_shift(scaling_advance, levels)
    return wavelet_shifts, scaling_shift


def alignment_shifts(filt: QmfFilter, kind: TransformKind, levels: int, n: int):
    """Circular shifts applied by `align` to each level.

    Returns
    -------
    (wavelet_shifts, scaling_shift)
        Tuple of per-level shifts for ``w_1..w_J0`` and the shift for
        ``v_J0``, in `np.roll` convention.
    """
    return _alignment_shifts_cached(filt.name, kind.value, levels, n)


def align(d: WaveletDecomposition) -> WaveletDecomposition:
    """Zero-phase align every level by its filter- and level-dependent shift.

    Alignment is a relabelling only (a circular shift per level); it makes
    coefficient indices correspond to event times in the analysed signal.
    Raises if `d` is already aligned, so accidental double shifts fail
    loudly.
    """
    if d.aligned:
        raise ValueError("decomposition is already aligned")
    wavelet_shifts, scaling_shift = alignment_shifts(
        d.filter, d.kind, d.levels, d.original_length
    )
    return replace(
        d,
        wavelet=[np.roll(w, s) for w, s in zip(d.wavelet, wavelet_shifts)],
        scaling=np.roll(d.scaling, scaling_shift),
        aligned=True,
    )


def unalign(d: WaveletDecomposition) -> WaveletDecomposition:
    """Undo `align` exactly."""
    if not d.aligned:
        raise ValueError("decomposition is not aligned")
    wavelet_shifts, scaling_shift = alignment_shifts(
        d.filter, d.kind, d.levels, d.original_length
    )
    return replace(
        d,
        wavelet=[np.roll(w, -s) for w, s in zip(d.wavelet, wavelet_shifts)],
        scaling=np.roll(d.scaling, -scaling_shift),
        aligned=False,
    )
