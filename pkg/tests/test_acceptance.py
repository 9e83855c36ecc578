"""Acceptance suite.

One test per acceptance criterion, each printing a PASS line with the
measured quantities (run with ``pytest tests/test_acceptance.py -v -s``).
The full-scale table reproduction (20 replicates at 30k/100k iterations,
hours of runtime) is marked ``slow``; the default run uses the fast-mode
configuration (10 replicates, 10k iterations) at its wider tolerance.
"""

import math
import os
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from caravan.bench import BenchCell, BenchSpec, preset_spec, run_benchmark
from caravan.denoise import DenoiseConfig, Method, denoise, estimate_sigma_mad, peak_height
from caravan.filters import FILTER_NAMES, make_filter
from caravan.sampler import (
    CaravanHyper,
    CaravanState,
    ChainConfig,
    a_log_target,
    gibbs_run,
    mwg_update_a,
    mwg_update_tau_gl,
    tau_gl_log_target,
)
from caravan.testsignals import gen_test_function
from caravan.transforms import (
    TransformKind,
    dwt_forward,
    dwt_inverse,
    modwt_forward,
    modwt_inverse,
    mra,
)

HYPER = CaravanHyper()

PAPER_TABLE1 = {  # caravan-mean cells, DWT LA(8) J0=6, N=512
    ("bumps", 7.0): 3.9,
    ("blocks", 7.0): 3.5,
    ("doppler", 7.0): 1.8,
    ("heavisine", 7.0): 1.2,
    ("bumps", 3.0): 21.0,
    ("blocks", 3.0): 19.4,
    ("doppler", 3.0): 8.4,
    ("heavisine", 3.0): 4.0,
}
PAPER_TABLE2 = {("bumps", 7.0): 3.2, ("doppler", 7.0): 1.5}


# ---------------------------------------------------------------------------
# Criterion 1: transform correctness (seconds)
# ---------------------------------------------------------------------------

def test_criterion1_energy_and_roundtrip():
    rng = np.random.default_rng(1)
    worst_energy = worst_round = 0.0
    for name in FILTER_NAMES:
        filt = make_filter(name)
        for _ in range(100):
            x = rng.standard_normal(256)
            d = dwt_forward(x, filt, 5)
            total = sum(w @ w for w in d.wavelet) + d.scaling @ d.scaling
            worst_energy = max(worst_energy, abs(total - x @ x))
            worst_round = max(worst_round, np.max(np.abs(dwt_inverse(d) - x)))
    assert worst_energy < 1e-10
    assert worst_round < 1e-10
    print(f"PASS criterion 1a: DWT energy dev {worst_energy:.2e}, "
          f"round-trip dev {worst_round:.2e} over 100 signals x 3 filters")


def test_criterion1_matrix_oracle():
    worst = 0.0
    for name in FILTER_NAMES:
        filt = make_filter(name)
        for n, levels in ((8, 3), (16, 2), (32, 3)):
            w = np.zeros((n, n))
            for i in range(n):
                e = np.zeros(n)
                e[i] = 1.0
                d = dwt_forward(e, filt, levels)
                w[:, i] = np.concatenate(list(d.wavelet) + [d.scaling])
            worst = max(worst, np.max(np.abs(w.T @ w - np.eye(n))))
    assert worst < 1e-12
    print(f"PASS criterion 1b: matrix-oracle orthogonality dev {worst:.2e} (N <= 32)")


def test_criterion1_mra_additivity():
    rng = np.random.default_rng(2)
    worst = 0.0
    for name in FILTER_NAMES:
        x = rng.standard_normal(512)
        m = mra(dwt_forward(x, make_filter(name), 4))
        worst = max(worst, np.max(np.abs(sum(m.details) + m.smooth - x)))
    assert worst < 1e-10
    print(f"PASS criterion 1c: MRA additivity dev {worst:.2e}")


def test_criterion1_modwt_dwt_subsampling():
    rng = np.random.default_rng(3)
    worst = 0.0
    for name in ("haar", "la8"):
        filt = make_filter(name)
        x = rng.standard_normal(512)
        dd = dwt_forward(x, filt, 4)
        dm = modwt_forward(x, filt, 4)
        for j in range(1, 5):
            idx = ((1 << j) * (np.arange(512 >> j) + 1) - 1) % 512
            dev = np.max(np.abs(2 ** (j / 2) * dm.wavelet[j - 1][idx] - dd.wavelet[j - 1]))
            worst = max(worst, dev)
        assert np.max(np.abs(modwt_inverse(dm) - x)) < 1e-10
    assert worst < 1e-10
    print(f"PASS criterion 1d: MODWT->DWT subsampling dev {worst:.2e} (haar, la8)")


# ---------------------------------------------------------------------------
# Criterion 2: sampler correctness (< 5 min)
# ---------------------------------------------------------------------------

def frozen_state(n, **kw):
    defaults = dict(beta=0.0, theta=1.0, lam=1.0, tau=1.0, tau_gl=1.0, a=1.0)
    defaults.update(kw)
    return CaravanState(
        beta=np.full(n, defaults["beta"]),
        theta=np.full(n, defaults["theta"]),
        lam=np.full(n, defaults["lam"]),
        tau=np.full(n, defaults["tau"]),
        tau_gl=defaults["tau_gl"],
        a=defaults["a"],
    )


def test_criterion2_ig_conditional_moments():
    from caravan.sampler import update_beta, update_lambda, update_tau, update_theta

    n = 100_000
    rng = np.random.default_rng(21)
    checks = []

    state = frozen_state(n + 1, a=5.0)
    update_theta(state, rng)
    dist = stats.invgamma(10.5, scale=10.0)  # interior theta
    dev = abs(state.theta[:-1].mean() - dist.mean())
    assert dev < 3 * dist.std() / math.sqrt(n)
    checks.append(f"theta-int {dev:.2e}")

    state = frozen_state(n + 1, a=2.0)
    update_lambda(state, HYPER, rng)
    dist = stats.invgamma(4.0, scale=4.0)  # interior lambda
    dev = abs(state.lam[1:].mean() - dist.mean())
    assert dev < 3 * dist.std() / math.sqrt(n)
    checks.append(f"lambda-int {dev:.2e}")

    state = frozen_state(n, tau_gl=1.5)
    update_tau(state, rng)  # IG(2, 1.5); mean finite, variance not:
    # check the reciprocal (Gamma) moments, which all exist
    dev = abs((1.0 / state.tau).mean() - 2.0 / 1.5)
    assert dev < 3 * (math.sqrt(2.0) / 1.5) / math.sqrt(n)
    assert stats.kstest(state.tau, stats.invgamma(2.0, scale=1.5).cdf).statistic < 0.01
    checks.append(f"tau-recip {dev:.2e}")

    state = frozen_state(n)
    update_beta(state, np.full(n, 2.0), 1.0, rng)  # N(1, 1/2)
    dev = abs(state.beta.mean() - 1.0)
    assert dev < 3 * math.sqrt(0.5 / n)
    assert abs(state.beta.var() - 0.5) < 3 * 0.5 * math.sqrt(2.0 / n)
    checks.append(f"beta {dev:.2e}")
    print(f"PASS criterion 2a: conditional moments within 3 MC SE ({'; '.join(checks)})")


def _grid_oracle(log_density):
    xs = np.linspace(-30.0, 30.0, 4001)
    lt = np.array([log_density(x) for x in xs])
    peak = int(np.argmax(lt))
    lo, hi = xs[peak] - 1.0, xs[peak] + 1.0
    while log_density(lo) > lt[peak] - 45:
        lo -= 1.0
    while log_density(hi) > lt[peak] - 45:
        hi += 1.0
    xs = np.linspace(lo, hi, 40_001)
    w = np.exp([log_density(x) - lt[peak] for x in xs])
    cdf = np.concatenate([[0.0], np.cumsum((w[1:] + w[:-1]) / 2 * np.diff(xs))])
    return xs, cdf / cdf[-1]


def _ks(samples, xs, cdf):
    s = np.sort(samples)
    theo = np.interp(s, xs, cdf)
    n = s.size
    return max(
        np.max(np.abs(np.arange(1, n + 1) / n - theo)),
        np.max(np.abs(np.arange(0, n) / n - theo)),
    )


def test_criterion2_mwg_grid_oracle_ks():
    n = 16
    xs, cdf = _grid_oracle(lambda x: x + tau_gl_log_target(math.exp(x), n, float(n), HYPER))
    state = frozen_state(n)
    rng = np.random.default_rng(1234)
    for _ in range(2000):
        mwg_update_tau_gl(state, HYPER, n, rng)
    draws = np.empty(100_000)
    for i in range(draws.size):
        mwg_update_tau_gl(state, HYPER, n, rng)
        draws[i] = state.tau_gl
    ks_gl = _ks(np.log(draws), xs, cdf)
    assert ks_gl < 0.02

    n2 = 2
    xs, cdf = _grid_oracle(lambda x: x + a_log_target(math.exp(x), n2, 3.0, HYPER))
    state = frozen_state(n2)
    rng = np.random.default_rng(99)
    for _ in range(2000):
        mwg_update_a(state, HYPER, n2, rng)
    draws = np.empty(100_000)
    for i in range(draws.size):
        mwg_update_a(state, HYPER, n2, rng)
        draws[i] = state.a
    ks_a = _ks(np.log(draws), xs, cdf)
    assert ks_a < 0.02
    print(f"PASS criterion 2b: MWG grid-oracle KS tau_gl={ks_gl:.4f}, a={ks_a:.4f} (< 0.02)")


def test_criterion2_acceptance_rates_on_doppler_levels():
    # Doppler, SNR 7, DWT LA(8) J0=6; with c_a=1.5 and c_gl=2.5 the MH
    # acceptance rates on the de-noised levels must fall in [0.25, 0.55].
    f = gen_test_function("doppler", 512)
    rng = np.random.default_rng(42)
    noisy = f + (1.0 / 7.0) * rng.standard_normal(512)
    d = dwt_forward(noisy, make_filter("la8"), 6)
    sigma = estimate_sigma_mad(d.wavelet[0])
    rates = []
    for j in (1, 2, 3, 4):
        summary, _ = gibbs_run(
            d.wavelet[j - 1], sigma, HYPER, ChainConfig(iterations=20_000, seed=j)
        )
        rates.append((j, summary.acceptance_rate_a, summary.acceptance_rate_tau_gl))
        assert 0.25 <= summary.acceptance_rate_a <= 0.55, (j, summary.acceptance_rate_a)
        assert 0.25 <= summary.acceptance_rate_tau_gl <= 0.55, (
            j, summary.acceptance_rate_tau_gl)
    pretty = ", ".join(f"level {j}: a={ra:.2f}/gl={rg:.2f}" for j, ra, rg in rates)
    print(f"PASS criterion 2c: acceptance rates in [0.25, 0.55] ({pretty})")


# ---------------------------------------------------------------------------
# Criteria 3 and 4: table reproductions
# ---------------------------------------------------------------------------

def _check_table1(result, tolerance, transform="dwt"):
    failures = []
    lines = []
    for (func, snr), target in PAPER_TABLE1.items():
        if func == "heavisine":
            candidates = ["heavisine", "heavisine-canonical"]
        else:
            candidates = [func]
        best_label, best_value, best_rel = None, None, None
        for label in candidates:
            cell = result.cells.get(BenchCell(label, snr, "caravan-mean", transform))
            if cell is None:
                continue
            rel = (cell.mean_sq_error - target) / target
            if best_rel is None or abs(rel) < abs(best_rel):
                best_label, best_value, best_rel = label, cell.mean_sq_error, rel
        assert best_value is not None, f"missing cell {func}/{snr}"
        lines.append(f"{best_label}/snr{snr:g}: {best_value:.2f} vs {target} ({best_rel:+.0%})")
        if abs(best_rel) > tolerance:
            failures.append(lines[-1])
    assert not failures, f"cells outside ±{tolerance:.0%}: {failures}"
    return lines


def _assert_noise_monotonicity(result, functions, transform="dwt"):
    for func in functions:
        low = result.cells[BenchCell(func, 7.0, "caravan-mean", transform)].mean_sq_error
        high = result.cells[BenchCell(func, 3.0, "caravan-mean", transform)].mean_sq_error
        assert high > low, (func, low, high)


def test_criterion3_table1_fast_mode():
    # 10 replicates, 10k iterations; must land within ±50% of the
    # published caravan-mean cells (HeaviSine under the closer of the two
    # printed/canonical variants) and finish well under 30 minutes.
    spec = preset_spec("table1-fast", master_seed=2024)
    result = run_benchmark(spec)
    lines = _check_table1(result, tolerance=0.50)
    _assert_noise_monotonicity(result, spec.functions)
    print("PASS criterion 3 (fast mode, ±50%): " + "; ".join(lines))


@pytest.mark.slow
def test_criterion3_table1_full():
    # 20 replicates, 30k iterations (100k for the piecewise signals), ±30%.
    spec = preset_spec("table1", master_seed=2024)
    result = run_benchmark(spec)
    lines = _check_table1(result, tolerance=0.30)
    _assert_noise_monotonicity(result, spec.functions)
    print("PASS criterion 3 (full, ±30%): " + "; ".join(lines))


def test_criterion4_table2_spot_check():
    spec = BenchSpec(
        functions=("bumps", "doppler"),
        n=512,
        snr_values=(7.0,),
        replicates=10,
        configs=(
            DenoiseConfig(
                transform=TransformKind.MODWT,
                levels=4,
                method=Method.CARAVAN_MEAN,
                chain=ChainConfig(iterations=10_000),
            ),
        ),
        master_seed=2024,
    )
    result = run_benchmark(spec)
    lines = []
    for (func, snr), target in PAPER_TABLE2.items():
        cell = result.cells[BenchCell(func, snr, "caravan-mean", "modwt")]
        rel = (cell.mean_sq_error - target) / target
        lines.append(f"{func}: {cell.mean_sq_error:.2f} vs {target} ({rel:+.0%})")
        assert abs(rel) <= 0.30, lines[-1]
    print("PASS criterion 4 (MODWT spot check, ±30%): " + "; ".join(lines))


# ---------------------------------------------------------------------------
# Criterion 5: NMR peak heights (skip when the data file is absent)
# ---------------------------------------------------------------------------

def _nmr_path():
    env = os.environ.get("CARAVAN_NMR_DATA")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / "data" / "nmr.dat"


nmr_file = _nmr_path()


@pytest.mark.skipif(not nmr_file.is_file(), reason="NMR data file not present")
def test_criterion5_nmr_peak_heights():
    values = np.loadtxt(nmr_file)
    assert values.size == 1024
    raw_peak = peak_height(values)
    assert abs(raw_peak - 58.02) < 0.01

    chain = ChainConfig(iterations=120_000, burn_in=40_000, seed=4)
    dwt_cfg = DenoiseConfig(
        transform=TransformKind.DWT, levels=4, method=Method.CARAVAN_MEDIAN, chain=chain
    )
    dwt_peak = peak_height(denoise(values, dwt_cfg).estimate)
    assert abs(dwt_peak - 57.78) < 0.5

    modwt_cfg = DenoiseConfig(
        transform=TransformKind.MODWT, levels=4, method=Method.CARAVAN_MEDIAN, chain=chain
    )
    modwt_peak = peak_height(denoise(values, modwt_cfg).estimate)
    assert abs(modwt_peak - 55.77) < 0.5
    print(
        f"PASS criterion 5: raw peak {raw_peak:.2f}, DWT median peak {dwt_peak:.2f}, "
        f"MODWT median peak {modwt_peak:.2f}"
    )


# ---------------------------------------------------------------------------
# Criterion 6: caravan beats the universal hard threshold on Bumps
# ---------------------------------------------------------------------------

def test_criterion6_baseline_ordering():
    spec = BenchSpec(
        functions=("bumps",),
        n=512,
        snr_values=(7.0,),
        replicates=20,
        configs=(
            DenoiseConfig(
                method=Method.CARAVAN_MEAN, chain=ChainConfig(iterations=10_000)
            ),
            DenoiseConfig(method=Method.HARD),
        ),
        master_seed=77,
    )
    result = run_benchmark(spec)
    caravan = result.cells[BenchCell("bumps", 7.0, "caravan-mean", "dwt")].mean_sq_error
    hard = result.cells[BenchCell("bumps", 7.0, "hard", "dwt")].mean_sq_error
    assert caravan < hard
    print(f"PASS criterion 6: caravan-mean {caravan:.2f} < hard threshold {hard:.2f} "
          "(20 paired replicates)")


# ---------------------------------------------------------------------------
# Criterion 7: byte-identical CLI outputs under a fixed seed
# ---------------------------------------------------------------------------

def test_criterion7_cli_determinism(tmp_path, monkeypatch):
    from caravan.cli import main

    monkeypatch.chdir(tmp_path)
    assert main(["simulate", "--function", "bumps", "--n", "256", "--snr", "7",
                 "--seed", "5", "--out", "data.csv"]) == 0

    pairs = []
    for tag in ("one", "two"):
        assert main(["denoise", "data.csv", "--method", "caravan-mean", "--levels", "3",
                     "--iterations", "500", "--burn-in", "150", "--seed", "6",
                     "--out", f"dn-{tag}"]) == 0
        assert main(["transform", "data.csv", "--levels", "3", "--aligned",
                     "--mra", "--out", f"tr-{tag}"]) == 0
        spec = tmp_path / "spec.txt"
        spec.write_text(
            "functions = doppler\nsnr = 7\nreplicates = 2\nmethods = hard\nseed = 9\n"
        )
        assert main(["bench", str(spec), "--out", f"bn-{tag}"]) == 0
        pairs.append(tag)

    compared = 0
    for sub in ("dn", "tr", "bn"):
        base = tmp_path / f"{sub}-one"
        for path in sorted(base.rglob("*.csv")) + sorted(base.rglob("*.txt")):
            twin = tmp_path / f"{sub}-two" / path.relative_to(base)
            assert path.read_bytes() == twin.read_bytes(), path
            compared += 1
    assert compared >= 6
    print(f"PASS criterion 7: {compared} artifact files byte-identical across reruns")
