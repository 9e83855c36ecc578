"""Command-line front end.

Subcommands: ``denoise`` (clean a data file), ``simulate`` (generate a
noisy test signal), ``bench`` (replicated benchmark runs), ``transform``
(dump wavelet coefficients and MRA components). All outputs are UTF-8
CSV files with headers; every random quantity is driven by an explicit
--seed flag, so repeated invocations are byte-identical. On failure,
partially written artifacts are removed and the exit code is non-zero.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace

import numpy as np

from . import bench as bench_mod
from .denoise import DenoiseConfig, Method, SigmaMode, denoise, peak_height
from .filters import FILTER_NAMES, make_filter
from .sampler import ChainConfig, export_diagnostics
from .testsignals import TEST_FUNCTION_NAMES
from .transforms import align, dwt_forward, modwt_forward, mra

_FUNCTION_CHOICES = TEST_FUNCTION_NAMES + ("heavisine-canonical",)

_DENOISE_PRESETS = {
    # Long-run settings for spectrometry-type data: LA(8), 4 levels,
    # posterior median from a 120k-iteration chain (first third burned).
    "nmr": {
        "filter": "la8",
        "levels": 4,
        "method": "caravan-median",
        "iterations": 120_000,
    },
}


class CliError(Exception):
    pass


class _Artifacts:
    """Tracks files written by a command so failures can clean up."""

    def __init__(self):
        self.paths = []

    def path(self, *parts):
        full = os.path.join(*parts)
        parent = os.path.dirname(full)
        if parent:
            os.makedirs(parent, exist_ok=True)
        self.paths.append(full)
        return full

    def discard(self):
        for p in self.paths:
            if os.path.isfile(p):
                os.remove(p)


def _read_values(path) -> np.ndarray:
    """One numeric value per line, or CSV with a `value` (or `x`) column.

    Comment lines starting with '#' are ignored either way.
    """
    if not os.path.isfile(path):
        raise CliError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise CliError(f"{path}: no data rows")
    try:  # a parseable first field means headerless numeric data
        float(lines[0].split(",")[0].strip())
        has_header = False
    except ValueError:
        has_header = True
    if has_header:
        reader = csv.DictReader(lines)
        fields = {c.strip().lower(): c for c in reader.fieldnames or []}
        column = fields.get("value") or fields.get("x")
        if column is None:
            raise CliError(f"{path}: CSV input needs a 'value' (or 'x') column")
        raw = [(row[column] or "").strip() for row in reader]
    else:
        raw = [ln.split(",")[0].strip() for ln in lines]
    values = []
    for i, token in enumerate(raw, start=1):
        try:
            values.append(float(token))
        except ValueError:
            raise CliError(f"{path}: non-numeric entry {token!r} at row {i}") from None
    if len(values) < 2:
        raise CliError(f"{path}: need at least 2 values, got {len(values)}")
    arr = np.asarray(values)
    if not np.all(np.isfinite(arr)):
        raise CliError(f"{path}: input contains non-finite values")
    return arr


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    return repr(float(value))


def _add_model_flags(parser, default_levels):
    parser.add_argument("--transform", choices=["dwt", "modwt"], default="dwt")
    parser.add_argument("--filter", choices=list(FILTER_NAMES), default="la8")
    parser.add_argument("--levels", type=int, default=default_levels)


def _add_chain_flags(parser):
    parser.add_argument("--method",
                        choices=[m.value for m in Method], default="caravan-mean")
    parser.add_argument("--iterations", type=int, default=30_000)
    parser.add_argument("--burn-in", type=int, default=None,
                        help="default: iterations // 3")
    parser.add_argument("--thinning", type=int, default=1)
    parser.add_argument("--sigma-mode",
                        choices=[m.value for m in SigmaMode], default=None,
                        help="default: mad-level1 for dwt, mad-each for modwt")
    parser.add_argument("--aligned", action="store_true",
                        help="zero-phase align coefficients during processing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caravan",
        description="Wavelet de-noising with an inverse-gamma Markov chain shrinkage prior.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="de-noise a data file")
    p.add_argument("input")
    _add_model_flags(p, default_levels=6)
    _add_chain_flags(p)
    p.add_argument("--preset", choices=sorted(_DENOISE_PRESETS), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="caravan-denoise", help="output directory")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("simulate", help="generate a noisy test signal")
    p.add_argument("--function", choices=list(_FUNCTION_CHOICES), required=True)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--snr", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="simulated.csv", help="output CSV file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="run a replicated benchmark")
    p.add_argument("spec", nargs="?", default=None,
                   help="key = value spec file (see docs); or use --preset")
    p.add_argument("--preset", choices=list(bench_mod.PRESET_NAMES), default=None)
    p.add_argument("--replicates", type=int, default=None,
                   help="override the preset/spec replicate count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="caravan-bench", help="output directory")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("transform", help="dump wavelet coefficients / MRA")
    p.add_argument("input")
    _add_model_flags(p, default_levels=4)
    p.add_argument("--aligned", action="store_true")
    p.add_argument("--mra", action="store_true", help="also write MRA components")
    p.add_argument("--out", default="caravan-transform", help="output directory")
    p.set_defaults(func=cmd_transform)
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_denoise(args, artifacts: _Artifacts) -> None:
    if args.preset:
        for key, value in _DENOISE_PRESETS[args.preset].items():
            setattr(args, key.replace("-", "_"), value)
    x = _read_values(args.input)
    iterations = args.iterations
    burn_in = args.burn_in if args.burn_in is not None else iterations // 3
    config = DenoiseConfig(
        transform=args.transform,
        filter_name=args.filter,
        levels=args.levels,
        method=args.method,
        chain=ChainConfig(
            iterations=iterations,
            burn_in=burn_in,
            thinning=args.thinning,
            seed=args.seed,
        ),
        sigma_mode=args.sigma_mode,
        align=args.aligned,
    )
    result = denoise(x, config)

    _write_csv(
        artifacts.path(args.out, "estimate.csv"),
        ["index", "estimate"],
        [(i + 1, _fmt(v)) for i, v in enumerate(result.estimate)],
    )
    _write_csv(
        artifacts.path(args.out, "sigmas.csv"),
        ["level", "sigma"],
        [(j + 1, _fmt(s)) for j, s in enumerate(result.sigma_estimates)],
    )
    if result.diagnostics is not None:
        for j, diag in enumerate(result.diagnostics, start=1):
            directory = os.path.join(args.out, f"diagnostics-level{j}")
            for name in ("traces.csv", "autocorrelations.csv", "running_means.csv"):
                artifacts.paths.append(os.path.join(directory, name))
            export_diagnostics(diag, directory)
    print(f"de-noised {x.size} values: transform={args.transform} "
          f"filter={args.filter} levels={args.levels} method={args.method}")
    print(f"sigma estimates: {', '.join(_fmt(s) for s in result.sigma_estimates)}")
    if result.summaries is not None:
        rates = ", ".join(
            f"level {j}: a={s.acceptance_rate_a:.2f} tau_gl={s.acceptance_rate_tau_gl:.2f}"
            for j, s in enumerate(result.summaries, start=1)
        )
        print(f"MH acceptance rates: {rates}")
    print(f"peak height: {_fmt(peak_height(result.estimate))}")
    print(f"outputs in {args.out}")


def cmd_simulate(args, artifacts: _Artifacts) -> None:
    if not args.snr > 0:
        raise CliError(f"--snr must be positive, got {args.snr}")
    if args.n < 2:
        raise CliError(f"--n must be at least 2, got {args.n}")
    signal = bench_mod.generate_signal(args.function, args.n)
    rng = np.random.default_rng(args.seed)
    noisy, sigma = bench_mod.add_noise(signal, args.snr, rng)
    t = np.arange(1, args.n + 1) / args.n
    path = artifacts.path(args.out)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# sigma = {_fmt(sigma)}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "f", "x"])
        for ti, fi, xi in zip(t, signal, noisy):
            writer.writerow([_fmt(ti), _fmt(fi), _fmt(xi)])
    print(f"wrote {args.n} samples of {args.function} at snr={args.snr:g} "
          f"(sigma={sigma:.6g}) to {path}")


def _parse_bench_spec(path, master_seed) -> bench_mod.BenchSpec:
    known = {
        "functions", "snr", "n", "replicates", "transform", "filter",
        "levels", "methods", "iterations", "burn_in", "thinning", "seed",
        "sigma_mode", "aligned",
    }
    values = {}
    overrides = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            value = value.strip()
            if key.startswith("iterations."):
                overrides.append((key.split(".", 1)[1], int(value)))
            elif key in known:
                values[key] = value
            else:
                raise CliError(f"{path}:{lineno}: unknown key {key!r}")
    def listed(key, default):
        if key not in values:
            return default
        return tuple(v.strip() for v in values[key].split(",") if v.strip())

    functions = listed("functions", ("bumps", "blocks", "doppler", "heavisine"))
    for f in functions:
        if f not in _FUNCTION_CHOICES:
            raise CliError(f"{path}: unknown function {f!r} in 'functions'")
    methods = listed("methods", ("caravan-mean",))
    try:
        methods = tuple(Method(m) for m in methods)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None
    snr_values = tuple(float(s) for s in listed("snr", ("7", "3")))
    if any(s <= 0 for s in snr_values):
        raise CliError(f"{path}: snr values must be positive")
    iterations = int(values.get("iterations", 30_000))
    burn_in = int(values["burn_in"]) if "burn_in" in values else iterations // 3
    chain = ChainConfig(
        iterations=iterations,
        burn_in=burn_in,
        thinning=int(values.get("thinning", 1)),
    )
    try:
        configs = tuple(
            DenoiseConfig(
                transform=values.get("transform", "dwt"),
                filter_name=values.get("filter", "la8"),
                levels=int(values.get("levels", 6)),
                method=m,
                chain=chain,
                sigma_mode=values.get("sigma_mode"),
                align=values.get("aligned", "false").lower() in ("1", "true", "yes"),
            )
            for m in methods
        )
        return bench_mod.BenchSpec(
            functions=functions,
            n=int(values.get("n", 512)),
            snr_values=snr_values,
            replicates=int(values.get("replicates", 20)),
            configs=configs,
            master_seed=int(values.get("seed", master_seed)),
            iteration_overrides=tuple(overrides),
        )
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def cmd_bench(args, artifacts: _Artifacts) -> None:
    if (args.spec is None) == (args.preset is None):
        raise CliError("provide either a spec file or --preset (not both)")
    if args.preset:
        spec = bench_mod.preset_spec(
            args.preset, master_seed=args.seed, replicates=args.replicates
        )
    else:
        spec = _parse_bench_spec(args.spec, args.seed)
        if args.replicates is not None:
            spec = replace(spec, replicates=args.replicates)
    result = bench_mod.run_benchmark(spec, workers=bench_mod.worker_count())
    bench_mod.write_results_csv(result, artifacts.path(args.out, "results.csv"))
    bench_mod.write_replicates_csv(result, artifacts.path(args.out, "replicates.csv"))
    table = bench_mod.render_table(result)
    with open(artifacts.path(args.out, "table.txt"), "w", encoding="utf-8") as fh:
        fh.write(table)
    print(table, end="")
    print(f"outputs in {args.out}")


def cmd_transform(args, artifacts: _Artifacts) -> None:
    x = _read_values(args.input)
    filt = make_filter(args.filter)
    if args.transform == "dwt":
        decomp = dwt_forward(x, filt, args.levels)
    else:
        decomp = modwt_forward(x, filt, args.levels)
    mra_decomp = mra(decomp) if args.mra else None
    exported = align(decomp) if args.aligned else decomp

    rows = []
    for j, w in enumerate(exported.wavelet, start=1):
        rows.extend((f"w{j}", i + 1, _fmt(v)) for i, v in enumerate(w))
    rows.extend(
        (f"v{exported.levels}", i + 1, _fmt(v)) for i, v in enumerate(exported.scaling)
    )
    _write_csv(
        artifacts.path(args.out, "coefficients.csv"),
        ["level", "index", "value"],
        rows,
    )
    if mra_decomp is not None:
        header = ["index", "x"] + [f"d{j}" for j in range(1, args.levels + 1)] + ["smooth"]
        body = []
        for i in range(x.size):
            row = [i + 1, _fmt(x[i])]
            row += [_fmt(d[i]) for d in mra_decomp.details]
            row.append(_fmt(mra_decomp.smooth[i]))
            body.append(row)
        _write_csv(artifacts.path(args.out, "mra.csv"), header, body)
    print(f"transformed {x.size} values: {args.transform} {args.filter} "
          f"J0={args.levels} aligned={args.aligned}")
    print(f"outputs in {args.out}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    artifacts = _Artifacts()
    try:
        args.func(args, artifacts)
    except (CliError, ValueError, OSError) as exc:
        artifacts.discard()
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
