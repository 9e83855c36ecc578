"""Gibbs sampler for one level of wavelet coefficients.

The prior couples the coefficient variances through an inverse-gamma
Markov chain (alternating latent variables lambda_0, theta_1, lambda_1,
..., lambda_{n-1}, theta_n) multiplied by per-coefficient local shrinkage
factors tau_i that are tied together by a global parameter tau_gl:

    beta_i | theta_i, tau_i   ~ N(0, theta_i * tau_i)
    theta_i | lambda_{i-1}    ~ IG(a, a / lambda_{i-1})
    lambda_i | theta_i        ~ IG(a, a / theta_i)
    tau_i | tau_gl            ~ IG(tau_gl, tau_gl)

with Gamma priors on the smoothing parameter `a` and on `tau_gl`, and an
IG(a0, b0) prior on lambda_0. All full conditionals are conjugate
(normal / inverse gamma) except those of `a` and `tau_gl`, which are
sampled with Gaussian random-walk Metropolis steps on the log scale.

Observations enter through the Gaussian likelihood
``y_i | beta_i ~ N(beta_i, sigma_hat^2)`` with a plug-in noise level.

The inner sweep kernels are numba-compiled; the module-level update
functions and `gibbs_run` share them, so a chain is exactly a loop over
the exported single-block updates.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "CaravanHyper",
    "ChainConfig",
    "CaravanState",
    "PosteriorSummary",
    "Diagnostics",
    "init_state",
    "update_beta",
    "update_theta",
    "update_lambda",
    "update_tau",
    "mwg_update_tau_gl",
    "mwg_update_a",
    "tau_gl_log_target",
    "a_log_target",
    "tau_gl_stat",
    "chain_edge_stat",
    "mwg_step_size",
    "gibbs_run",
    "export_diagnostics",
    "autocorrelation",
]

# Rates, variances and raw gamma draws are clamped away from 0 before any
# division so a pathological draw cannot poison the chain with inf/nan.
_FLOOR = 1e-300


@dataclass(frozen=True)
class CaravanHyper:
    """Hyperparameters of the shrinkage prior and MH step-size constants.

    The defaults are the non-informative choices used throughout the
    synthetic experiments; `c_a` and `c_gl` scale the log-space random
    walk steps as ``h = c / log2(n)``.
    """

    a0: float = 0.1
    b0: float = 0.1
    a_a: float = 0.1
    b_a: float = 0.1
    a_gl: float = 0.1
    b_gl: float = 0.1
    c_a: float = 1.5
    c_gl: float = 2.5

    def __post_init__(self):
        for name in ("a0", "b0", "a_a", "b_a", "a_gl", "b_gl", "c_a", "c_gl"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"hyperparameter {name} must be positive, got {value}")


@dataclass(frozen=True)
class ChainConfig:
    """MCMC run parameters.

    `burn_in` defaults to one third of `iterations` when left as None.
    """

    iterations: int = 30_000
    burn_in: int | None = None
    thinning: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.iterations // 3)
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError(
                f"burn_in must lie in [0, iterations), got {self.burn_in}"
            )
        if self.thinning < 1:
            raise ValueError(f"thinning must be >= 1, got {self.thinning}")
        if (self.iterations - self.burn_in) // self.thinning < 1:
            raise ValueError(
                "no samples would be retained: decrease thinning or burn_in"
            )
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    @property
    def retained(self) -> int:
        return (self.iterations - self.burn_in) // self.thinning


@dataclass
class CaravanState:
    """One Gibbs-sampler state for a level of n coefficients.

    ``lam[0]`` is the chain head lambda_0; ``lam[i]`` for i >= 1 sits
    between theta_i and theta_{i+1} (1-based theta indexing).
    """

    beta: np.ndarray
    theta: np.ndarray
    lam: np.ndarray
    tau: np.ndarray
    tau_gl: float
    a: float

    @property
    def n(self) -> int:
        return self.beta.size


@dataclass(frozen=True)
class PosteriorSummary:
    mean: np.ndarray
    median: np.ndarray
    acceptance_rate_a: float
    acceptance_rate_tau_gl: float
    retained_samples: int


@dataclass(frozen=True)
class Diagnostics:
    """Raw material for trace/autocorrelation/running-mean plots."""

    iterations: np.ndarray
    traces: dict
    autocorrelations: dict
    running_means: dict
    max_lag: int


def init_state(y, hyper: CaravanHyper, rng=None) -> CaravanState:
    """Initial state: beta at the observations, variance chain at ones."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y must be a non-empty 1-D sequence")
    n = y.size
    return CaravanState(
        beta=y.copy(),
        theta=np.ones(n),
        lam=np.ones(n),
        tau=np.ones(n),
        tau_gl=1.0,
        a=1.0,
    )


# ---------------------------------------------------------------------------
# Compiled single-block updates
# ---------------------------------------------------------------------------

@njit(cache=True)
def _ig_draw(shape, rate, rng):
    """IG(shape, rate) draw via an inverted Gamma(shape, rate) draw."""
    d = rng.gamma(shape, 1.0 / max(rate, _FLOOR))
    return 1.0 / max(d, _FLOOR)


@njit(cache=True)
def _beta_sweep(beta, theta, tau, y, sigma_hat, rng):
    inv_s2 = 1.0 / (sigma_hat * sigma_hat)
    for i in range(beta.size):
        prior_var = max(theta[i] * tau[i], _FLOOR)
        xi1 = 1.0 / (1.0 / prior_var + inv_s2)
        beta[i] = xi1 * y[i] * inv_s2 + math.sqrt(xi1) * rng.standard_normal()


@njit(cache=True)
def _theta_sweep(theta, lam, beta, tau, a, rng):
    n = theta.size
    for i in range(n):
        rate = a / lam[i] + beta[i] * beta[i] / (2.0 * max(tau[i], _FLOOR))
        if i < n - 1:
            rate += a / lam[i + 1]
            shape = 2.0 * a + 0.5
        else:
            shape = a + 0.5
        theta[i] = _ig_draw(shape, rate, rng)


@njit(cache=True)
def _lambda_sweep(lam, theta, a, a0, b0, rng):
    lam[0] = _ig_draw(a0 + a, b0 + a / theta[0], rng)
    for i in range(1, lam.size):
        lam[i] = _ig_draw(2.0 * a, a / theta[i - 1] + a / theta[i], rng)


@njit(cache=True)
def _tau_sweep(tau, beta, theta, tau_gl, rng):
    for i in range(tau.size):
        rate = tau_gl + beta[i] * beta[i] / (2.0 * max(theta[i], _FLOOR))
        tau[i] = _ig_draw(tau_gl + 0.5, rate, rng)


@njit(cache=True)
def _tau_gl_stat(tau):
    s = 0.0
    for i in range(tau.size):
        s += math.log(tau[i]) + 1.0 / tau[i]
    return s


@njit(cache=True)
def _edge_stat(theta, lam):
    n = theta.size
    s = 0.0
    for i in range(n):
        p = lam[i] * theta[i]
        s += math.log(p) + 1.0 / p
    for i in range(n - 1):
        p = theta[i] * lam[i + 1]
        s += math.log(p) + 1.0 / p
    return s


@njit(cache=True)
def _ig_chain_log_target(value, m, alpha, beta, stat):
    """Shared log full conditional of tau_gl (m = n) and a (m = 2n - 1):

        (alpha - 1 + m v) log v - m log Gamma(v) - v (beta + stat)
    """
    if value <= 0.0 or not math.isfinite(value):
        return -math.inf
    return (
        (alpha - 1.0 + m * value) * math.log(value)
        - m * math.lgamma(value)
        - value * (beta + stat)
    )


@njit(cache=True)
def _mwg_step(current, h, m, alpha, beta, stat, rng):
    """Gaussian random-walk MH step on the log scale.

    The log-reparametrised target is exp(x) * pi(exp(x)); non-finite
    proposal values are rejected outright.
    """
    z = rng.standard_normal()
    u = rng.random()
    cur_log = math.log(current)
    prop_log = cur_log + h * z
    if prop_log > 700.0:  # exp overflow
        return current, False
    prop = math.exp(prop_log)
    log_ratio = (prop_log + _ig_chain_log_target(prop, m, alpha, beta, stat)) - (
        cur_log + _ig_chain_log_target(current, m, alpha, beta, stat)
    )
    if not math.isfinite(log_ratio):
        return current, False
    log_u = math.log(u) if u > 0.0 else -math.inf
    if log_u < log_ratio:
        return prop, True
    return current, False


@njit(cache=True)
def _run_chain(
    y,
    sigma_hat,
    a0,
    b0,
    a_a,
    b_a,
    a_gl,
    b_gl,
    h_a,
    h_gl,
    iterations,
    burn_in,
    thinning,
    rng,
    beta_samples,
    a_trace,
    tau_gl_trace,
    tracked_idx,
    beta_traces,
    kept_iterations,
):
    n = y.size
    beta = y.copy()
    theta = np.ones(n)
    lam = np.ones(n)
    tau = np.ones(n)
    tau_gl = 1.0
    a = 1.0
    m_gl = float(n)
    m_a = float(2 * n - 1)
    acc_a = 0
    acc_gl = 0
    kept = 0
    for it in range(1, iterations + 1):
        _beta_sweep(beta, theta, tau, y, sigma_hat, rng)
        _theta_sweep(theta, lam, beta, tau, a, rng)
        _lambda_sweep(lam, theta, a, a0, b0, rng)
        _tau_sweep(tau, beta, theta, tau_gl, rng)
        tau_gl, acc = _mwg_step(tau_gl, h_gl, m_gl, a_gl, b_gl, _tau_gl_stat(tau), rng)
        if acc:
            acc_gl += 1
        a, acc = _mwg_step(a, h_a, m_a, a_a, b_a, _edge_stat(theta, lam), rng)
        if acc:
            acc_a += 1
        offset = it - burn_in
        if offset > 0 and offset % thinning == 0:
            beta_samples[kept] = beta
            a_trace[kept] = a
            tau_gl_trace[kept] = tau_gl
            for t in range(tracked_idx.size):
                beta_traces[kept, t] = beta[tracked_idx[t]]
            kept_iterations[kept] = it
            kept += 1
    return acc_a, acc_gl


# ---------------------------------------------------------------------------
# Single-block updates (spec surface; same kernels as the full chain)
# ---------------------------------------------------------------------------

def update_beta(state: CaravanState, y, sigma_hat: float, rng) -> CaravanState:
    """Conjugate normal update of every coefficient, in place.

    The conditional variance is ``xi1 = 1 / (1/(theta_i tau_i) + 1/s^2)``
    and the conditional mean ``xi1 * y_i / s^2``.
    """
    if not sigma_hat > 0:
        raise ValueError(f"sigma_hat must be positive, got {sigma_hat}")
    _beta_sweep(state.beta, state.theta, state.tau, np.asarray(y, dtype=float),
                float(sigma_hat), rng)
    return state


def update_theta(state: CaravanState, rng) -> CaravanState:
    """Inverse-gamma update of the variance chain's theta block.

    Interior theta_i see both neighbouring lambdas (shape 2a + 1/2); the
    terminal theta_n only lambda_{n-1} (shape a + 1/2).
    """
    _theta_sweep(state.theta, state.lam, state.beta, state.tau, state.a, rng)
    return state


def update_lambda(state: CaravanState, hyper: CaravanHyper, rng) -> CaravanState:
    """Inverse-gamma update of the latent lambda block (head included)."""
    _lambda_sweep(state.lam, state.theta, state.a, hyper.a0, hyper.b0, rng)
    return state


def update_tau(state: CaravanState, rng) -> CaravanState:
    """Independent inverse-gamma updates of the local shrinkage factors."""
    _tau_sweep(state.tau, state.beta, state.theta, state.tau_gl, rng)
    return state


def tau_gl_stat(tau) -> float:
    """Sufficient statistic sum(log tau_i + 1/tau_i) of the tau block."""
    return float(_tau_gl_stat(np.asarray(tau, dtype=float)))


def chain_edge_stat(theta, lam) -> float:
    """sum over the 2n - 1 chain edges (u, w) of log(u w) + 1/(u w).

    The edges are (lambda_{i-1}, theta_i) for i = 1..n and
    (theta_i, lambda_i) for i = 1..n-1.
    """
    return float(_edge_stat(np.asarray(theta, dtype=float), np.asarray(lam, dtype=float)))


def tau_gl_log_target(value: float, n: int, stat: float, hyper: CaravanHyper) -> float:
    """Log full conditional of tau_gl (up to an additive constant)."""
    return float(_ig_chain_log_target(float(value), float(n), hyper.a_gl, hyper.b_gl, stat))


def a_log_target(value: float, n: int, stat: float, hyper: CaravanHyper) -> float:
    """Log full conditional of the smoothing parameter a for an n-chain."""
    return float(
        _ig_chain_log_target(float(value), float(2 * n - 1), hyper.a_a, hyper.b_a, stat)
    )


def mwg_step_size(c: float, n: int) -> float:
    """Random-walk step h = c / log2(n) (floored at c for tiny levels)."""
    return c / max(math.log2(n), 1.0)


def mwg_update_tau_gl(state: CaravanState, hyper: CaravanHyper, n: int, rng):
    """Metropolis step for tau_gl; returns (state, accepted)."""
    stat = _tau_gl_stat(state.tau)
    h = mwg_step_size(hyper.c_gl, n)
    value, accepted = _mwg_step(
        state.tau_gl, h, float(state.n), hyper.a_gl, hyper.b_gl, stat, rng
    )
    state.tau_gl = value
    return state, bool(accepted)


def mwg_update_a(state: CaravanState, hyper: CaravanHyper, n: int, rng):
    """Metropolis step for the smoothing parameter a; returns (state, accepted)."""
    stat = _edge_stat(state.theta, state.lam)
    h = mwg_step_size(hyper.c_a, n)
    value, accepted = _mwg_step(
        state.a, h, float(2 * state.n - 1), hyper.a_a, hyper.b_a, stat, rng
    )
    state.a = value
    return state, bool(accepted)


# ---------------------------------------------------------------------------
# Full chain
# ---------------------------------------------------------------------------

def _default_track(n: int):
    return ("a", "tau_gl") + tuple(f"beta_{i}" for i in range(1, min(n, 4) + 1))


def autocorrelation(trace, max_lag: int) -> np.ndarray:
    """Sample autocorrelation r_0..r_max_lag (r_0 = 1 exactly)."""
    x = np.asarray(trace, dtype=float)
    max_lag = min(max_lag, x.size - 1)
    centred = x - x.mean()
    c0 = centred @ centred
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    if c0 <= 0:
        out[1:] = 0.0
        return out
    for k in range(1, max_lag + 1):
        out[k] = (centred[:-k] @ centred[k:]) / c0
    return out


def gibbs_run(
    y,
    sigma_hat: float,
    hyper: CaravanHyper,
    config: ChainConfig,
    track=None,
    max_lag: int = 100,
):
    """Run the full Gibbs sampler on one level of empirical coefficients.

    Each sweep updates, in order: beta, theta, lambda, tau, tau_gl, a.
    Draws after `config.burn_in` sweeps are retained every
    `config.thinning` sweeps. Deterministic for a fixed `config.seed`.

    Parameters
    ----------
    y : array_like
        Empirical wavelet coefficients of one level (length n >= 1).
    sigma_hat : float
        Plug-in noise standard deviation.
    hyper : CaravanHyper
    config : ChainConfig
    track : sequence of str, optional
        Parameters whose traces feed the diagnostics; names are "a",
        "tau_gl" or "beta_<i>" (1-based). Defaults to a, tau_gl and
        beta_1..beta_4.
    max_lag : int
        Largest autocorrelation lag in the diagnostics.

    Returns
    -------
    (PosteriorSummary, Diagnostics)
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    if not (np.isfinite(sigma_hat) and sigma_hat > 0):
        raise ValueError(f"sigma_hat must be positive and finite, got {sigma_hat}")
    n = y.size
    track = _default_track(n) if track is None else tuple(track)
    beta_names = []
    for name in track:
        if name in ("a", "tau_gl"):
            continue
        if name.startswith("beta_"):
            idx = int(name.split("_", 1)[1])
            if not 1 <= idx <= n:
                raise ValueError(f"tracked coefficient {name} out of range 1..{n}")
            beta_names.append(name)
        else:
            raise ValueError(f"unknown tracked parameter {name!r}")
    tracked_idx = np.array(
        [int(name.split("_", 1)[1]) - 1 for name in beta_names], dtype=np.int64
    )

    rng = np.random.default_rng(config.seed)
    retained = config.retained
    beta_samples = np.empty((retained, n))
    a_trace = np.empty(retained)
    tau_gl_trace = np.empty(retained)
    beta_traces = np.empty((retained, tracked_idx.size))
    kept_iterations = np.empty(retained, dtype=np.int64)
    acc_a, acc_gl = _run_chain(
        y,
        float(sigma_hat),
        hyper.a0,
        hyper.b0,
        hyper.a_a,
        hyper.b_a,
        hyper.a_gl,
        hyper.b_gl,
        mwg_step_size(hyper.c_a, n),
        mwg_step_size(hyper.c_gl, n),
        config.iterations,
        config.burn_in,
        config.thinning,
        rng,
        beta_samples,
        a_trace,
        tau_gl_trace,
        tracked_idx,
        beta_traces,
        kept_iterations,
    )

    summary = PosteriorSummary(
        mean=beta_samples.mean(axis=0),
        median=np.median(beta_samples, axis=0),
        acceptance_rate_a=acc_a / config.iterations,
        acceptance_rate_tau_gl=acc_gl / config.iterations,
        retained_samples=retained,
    )
    traces = {}
    for name in track:
        if name == "a":
            traces[name] = a_trace
        elif name == "tau_gl":
            traces[name] = tau_gl_trace
        else:
            traces[name] = beta_traces[:, beta_names.index(name)].copy()
    diagnostics = Diagnostics(
        iterations=kept_iterations,
        traces=traces,
        autocorrelations={
            name: autocorrelation(trace, max_lag) for name, trace in traces.items()
        },
        running_means={
            name: np.cumsum(trace) / np.arange(1, trace.size + 1)
            for name, trace in traces.items()
        },
        max_lag=max_lag,
    )
    return summary, diagnostics


def export_diagnostics(diag: Diagnostics, directory) -> dict:
    """Write trace/autocorrelation/running-mean CSV files.

    Creates ``traces.csv`` with columns (iteration, parameter, value),
    ``autocorrelations.csv`` with (lag, parameter, acf) and
    ``running_means.csv`` with (iteration, parameter, running_mean).
    Returns the mapping of logical name to written path.
    """
    os.makedirs(directory, exist_ok=True)
    paths = {
        "traces": os.path.join(directory, "traces.csv"),
        "autocorrelations": os.path.join(directory, "autocorrelations.csv"),
        "running_means": os.path.join(directory, "running_means.csv"),
    }
    with open(paths["traces"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "parameter", "value"])
        for name, trace in diag.traces.items():
            for it, value in zip(diag.iterations, trace):
                writer.writerow([int(it), name, repr(float(value))])
    with open(paths["autocorrelations"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag", "parameter", "acf"])
        for name, acf in diag.autocorrelations.items():
            for lag, value in enumerate(acf):
                writer.writerow([lag, name, repr(float(value))])
    with open(paths["running_means"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "parameter", "running_mean"])
        for name, rm in diag.running_means.items():
            for it, value in zip(diag.iterations, rm):
                writer.writerow([int(it), name, repr(float(value))])
    return paths
