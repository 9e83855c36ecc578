"""Bayesian wavelet de-noising with an inverse-gamma Markov chain prior."""

from .bench import (
    BenchCell,
    BenchResult,
    BenchSpec,
    add_noise,
    generate_signal,
    preset_spec,
    render_table,
    run_benchmark,
    squared_error,
)
from .denoise import (
    DenoiseConfig,
    DenoiseResult,
    Method,
    SigmaMode,
    denoise,
    estimate_sigma_mad,
    peak_height,
    universal_threshold,
)
from .filters import QmfFilter, make_filter
from .sampler import (
    CaravanHyper,
    CaravanState,
    ChainConfig,
    Diagnostics,
    PosteriorSummary,
    export_diagnostics,
    gibbs_run,
)
from .testsignals import gen_test_function
from .transforms import (
    MraDecomposition,
    TransformKind,
    WaveletDecomposition,
    align,
    alignment_shifts,
    dwt_forward,
    dwt_inverse,
    inverse_transform,
    modwt_forward,
    modwt_inverse,
    mra,
    unalign,
)

__version__ = "0.1.0"
