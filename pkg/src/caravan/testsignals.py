"""Classical de-noising test signals (Donoho & Johnstone 1994).

Each generator samples its function on the grid ``t_i = i/N, i = 1..N``
and rescales the samples to unit sample standard deviation, so that a
signal-to-noise ratio translates directly into a noise level.
"""

from __future__ import annotations

import numpy as np

__all__ = ["gen_test_function", "TEST_FUNCTION_NAMES", "HEAVISINE_VARIANTS"]

TEST_FUNCTION_NAMES = ("bumps", "blocks", "doppler", "heavisine")
HEAVISINE_VARIANTS = ("printed", "canonical")

_CHANGE_POINTS = np.array(
    [0.1, 0.13, 0.15, 0.23, 0.25, 0.4, 0.44, 0.65, 0.76, 0.78, 0.81]
)
_BUMP_HEIGHTS = np.array([4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
_BUMP_WIDTHS = np.array(
    [0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005]
)
_BLOCK_HEIGHTS = np.array([4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])


def _bumps(t: np.ndarray) -> np.ndarray:
    u = (t[:, None] - _CHANGE_POINTS) / _BUMP_WIDTHS
    return ((1.0 + np.abs(u)) ** -4) @ _BUMP_HEIGHTS


def _blocks(t: np.ndarray) -> np.ndarray:
    k = 0.5 * (1.0 + np.sign(t[:, None] - _CHANGE_POINTS))
    return k @ _BLOCK_HEIGHTS


def _doppler(t: np.ndarray) -> np.ndarray:
    return np.sqrt(t * (1.0 - t)) * np.sin(2.0 * np.pi * 1.05 / (t + 0.05))


def _heavisine(t: np.ndarray, canonical: bool) -> np.ndarray:
    # The canonical Donoho-Johnstone form oscillates as sin(4 pi t); the
    # "printed" variant keeps a single half-period sin(pi t) carrier.
    freq = 4.0 * np.pi if canonical else np.pi
    return 4.0 * np.sin(freq * t) - np.sign(t - 0.3) - np.sign(0.72 - t)


def gen_test_function(name: str, n: int, variant: str | None = None) -> np.ndarray:
    """Sample a named test function on ``t_i = i/n`` and rescale to SD 1.

    Parameters
    ----------
    name : str
        One of ``"bumps"``, ``"blocks"``, ``"doppler"``, ``"heavisine"``.
    n : int
        Number of samples (>= 2).
    variant : str, optional
        Only meaningful for HeaviSine: ``"printed"`` (default) or
        ``"canonical"`` selects the carrier frequency.

    Returns
    -------
    ndarray
        Length-`n` samples with sample standard deviation exactly 1.
    """
    key = str(name).strip().lower()
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if variant is not None and key != "heavisine":
        raise ValueError(f"variant flag only applies to heavisine, not {name!r}")
    t = np.arange(1, n + 1) / n
    if key == "bumps":
        f = _bumps(t) / 7.0
    elif key == "blocks":
        f = _blocks(t)
    elif key == "doppler":
        f = _doppler(t)
    elif key == "heavisine":
        variant = variant or "printed"
        if variant not in HEAVISINE_VARIANTS:
            raise ValueError(
                f"unknown heavisine variant {variant!r}: expected one of {HEAVISINE_VARIANTS}"
            )
        f = _heavisine(t, canonical=(variant == "canonical"))
    else:
        raise ValueError(
            f"unknown test function {name!r}: expected one of {TEST_FUNCTION_NAMES}"
        )
    return f / np.std(f, ddof=1)
