"""End-to-end wavelet de-noising.

Pipeline: forward transform, per-level noise estimate (MAD on the finest
DWT level, or per-level for the MODWT), independent per-level coefficient
inference (Bayesian shrinkage chains or classical thresholding), scaling
coefficients passed through untouched, inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .filters import make_filter
from .sampler import CaravanHyper, ChainConfig, gibbs_run
from .transforms import (
    TransformKind,
    align,
    dwt_forward,
    inverse_transform,
    modwt_forward,
    unalign,
)

__all__ = [
    "Method",
    "SigmaMode",
    "DenoiseConfig",
    "DenoiseResult",
    "estimate_sigma_mad",
    "universal_threshold",
    "denoise",
    "peak_height",
    "level_seed",
]

# Phi^{-1}(0.75): makes the MAD consistent for a Gaussian scale.
MAD_NORMALISER = 0.6744897501960817


class Method(str, Enum):
    CARAVAN_MEAN = "caravan-mean"
    CARAVAN_MEDIAN = "caravan-median"
    HARD = "hard"
    SOFT = "soft"

    @property
    def is_caravan(self) -> bool:
        return self in (Method.CARAVAN_MEAN, Method.CARAVAN_MEDIAN)


class SigmaMode(str, Enum):
    MAD_LEVEL1 = "mad-level1"   # one estimate from the finest level (DWT)
    MAD_EACH = "mad-each"       # per-level MAD (MODWT)
    MAD_SCALED = "mad-scaled"   # sigma_j^2 = 2^(1-j) sigma_1^2 (MODWT)


_VALID_SIGMA = {
    TransformKind.DWT: (SigmaMode.MAD_LEVEL1,),
    TransformKind.MODWT: (SigmaMode.MAD_EACH, SigmaMode.MAD_SCALED),
}


@dataclass(frozen=True)
class DenoiseConfig:
    """Settings for one de-noising run."""

    transform: TransformKind = TransformKind.DWT
    filter_name: str = "la8"
    levels: int = 6
    method: Method = Method.CARAVAN_MEAN
    chain: ChainConfig = field(default_factory=ChainConfig)
    hyper: CaravanHyper = field(default_factory=CaravanHyper)
    sigma_mode: SigmaMode | None = None
    align: bool = False

    def __post_init__(self):
        object.__setattr__(self, "transform", TransformKind(self.transform))
        object.__setattr__(self, "method", Method(self.method))
        if self.sigma_mode is None:
            default = (
                SigmaMode.MAD_LEVEL1
                if self.transform is TransformKind.DWT
                else SigmaMode.MAD_EACH
            )
            object.__setattr__(self, "sigma_mode", default)
        else:
            object.__setattr__(self, "sigma_mode", SigmaMode(self.sigma_mode))
        if self.sigma_mode not in _VALID_SIGMA[self.transform]:
            raise ValueError(
                f"sigma mode {self.sigma_mode.value!r} is not valid for the "
                f"{self.transform.value} transform"
            )
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        make_filter(self.filter_name)  # fail early on bad names


@dataclass(frozen=True)
class DenoiseResult:
    """Estimate plus per-level inference byproducts.

    For the Bayesian methods both point estimates are available
    (`estimate` equals whichever the config selected); `summaries` and
    `diagnostics` hold one entry per de-noised level, finest first.
    """

    estimate: np.ndarray
    sigma_estimates: np.ndarray
    estimate_mean: np.ndarray | None = None
    estimate_median: np.ndarray | None = None
    summaries: list | None = None
    diagnostics: list | None = None


def estimate_sigma_mad(coeffs) -> float:
    """Noise level from the median absolute deviation of `coeffs`.

    Scaled by 1/0.67449 so the estimate is consistent for Gaussian noise.
    Raises if the MAD is zero (degenerate input such as an all-constant
    level).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0:
        raise ValueError("cannot estimate a noise level from an empty sequence")
    mad = np.median(np.abs(coeffs - np.median(coeffs)))
    if mad <= 0:
        raise ValueError(
            "degenerate noise estimate: median absolute deviation is zero"
        )
    return float(mad / MAD_NORMALISER)


def universal_threshold(coeffs, sigma: float, mode: str) -> np.ndarray:
    """Hard or soft thresholding at the universal level sigma*sqrt(2 ln n)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size < 1:
        raise ValueError("empty coefficient vector")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    mode = Method(mode)
    if mode not in (Method.HARD, Method.SOFT):
        raise ValueError(f"threshold mode must be hard or soft, got {mode.value!r}")
    lam = sigma * np.sqrt(2.0 * np.log(coeffs.size))
    if mode is Method.HARD:
        return np.where(np.abs(coeffs) <= lam, 0.0, coeffs)
    return np.sign(coeffs) * np.maximum(np.abs(coeffs) - lam, 0.0)


def peak_height(estimate) -> float:
    """Largest value of the sequence (the de-noising figure of merit for
    spectrometry-type signals)."""
    estimate = np.asarray(estimate, dtype=float)
    if estimate.size == 0:
        raise ValueError("empty sequence has no peak")
    return float(np.max(estimate))


def level_seed(master_seed: int, level: int) -> int:
    """Deterministic per-level chain seed, independent of processing order."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(level),))
    return int(ss.generate_state(1, np.uint64)[0])


def _sigma_per_level(decomp, mode: SigmaMode) -> np.ndarray:
    if mode is SigmaMode.MAD_LEVEL1:
        sigma = estimate_sigma_mad(decomp.wavelet[0])
        return np.full(decomp.levels, sigma)
    if mode is SigmaMode.MAD_EACH:
        return np.array([estimate_sigma_mad(w) for w in decomp.wavelet])
    sigma1 = estimate_sigma_mad(decomp.wavelet[0])
    j = np.arange(1, decomp.levels + 1)
    return sigma1 * np.sqrt(2.0 ** (1.0 - j))


def denoise(x, config: DenoiseConfig) -> DenoiseResult:
    """De-noise a sequence according to `config`.

    Every wavelet level up to `config.levels` is processed independently
    by the configured method; the final-level scaling coefficients are
    kept as observed (empirical scaling coefficients). For the Bayesian
    methods each level runs its own chain with a seed derived from the
    master seed and the level index, so results do not depend on the
    order levels are processed in.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D sequence, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite values")
    filt = make_filter(config.filter_name)
    if config.transform is TransformKind.DWT:
        decomp = dwt_forward(x, filt, config.levels)
    else:
        decomp = modwt_forward(x, filt, config.levels)
    sigmas = _sigma_per_level(decomp, config.sigma_mode)

    if config.align:
        decomp = align(decomp)

    processed = decomp.copy()
    if config.method.is_caravan:
        summaries = []
        diagnostics = []
        means = []
        medians = []
        for j, w in enumerate(decomp.wavelet, start=1):
            chain = replace(config.chain, seed=level_seed(config.chain.seed, j))
            summary, diag = gibbs_run(w, float(sigmas[j - 1]), config.hyper, chain)
            summaries.append(summary)
            diagnostics.append(diag)
            means.append(summary.mean)
            medians.append(summary.median)
        mean_decomp = replace(processed, wavelet=means)
        median_decomp = replace(processed, wavelet=medians)
        if config.align:
            mean_decomp = unalign(mean_decomp)
            median_decomp = unalign(median_decomp)
        estimate_mean = inverse_transform(mean_decomp)
        estimate_median = inverse_transform(median_decomp)
        estimate = (
            estimate_mean if config.method is Method.CARAVAN_MEAN else estimate_median
        )
        return DenoiseResult(
            estimate=estimate,
            sigma_estimates=sigmas,
            estimate_mean=estimate_mean,
            estimate_median=estimate_median,
            summaries=summaries,
            diagnostics=diagnostics,
        )

    thresholded = [
        universal_threshold(w, float(sigmas[j - 1]), config.method)
        for j, w in enumerate(decomp.wavelet, start=1)
    ]
    out = replace(processed, wavelet=thresholded)
    if config.align:
        out = unalign(out)
    return DenoiseResult(estimate=inverse_transform(out), sigma_estimates=sigmas)
