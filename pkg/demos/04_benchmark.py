"""Benchmark harness in miniature.

Runs a reduced replicate study (all four test functions, both SNRs,
caravan versus hard thresholding) and renders the result table with the
published EBayes reference constants alongside. The full published grids
are available as presets: see `caravan.bench.preset_spec` or the CLI
(`caravan bench --preset table1`).
"""

from pathlib import Path

from caravan.bench import BenchSpec, render_table, run_benchmark, write_results_csv
from caravan.denoise import DenoiseConfig
from caravan.sampler import ChainConfig

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

chain = ChainConfig(iterations=4000, burn_in=1333)
spec = BenchSpec(
    functions=("bumps", "blocks", "doppler", "heavisine-canonical"),
    n=512,
    snr_values=(7.0, 3.0),
    replicates=3,  # desk-scale demo; the presets use 20
    configs=(
        DenoiseConfig(method="caravan-mean", levels=6, chain=chain),
        DenoiseConfig(method="caravan-median", levels=6, chain=chain),
        DenoiseConfig(method="hard", levels=6),
    ),
    master_seed=123,
)
result = run_benchmark(spec)
print(render_table(result))
write_results_csv(result, OUT / "mini_benchmark.csv")
print(f"wrote {OUT / 'mini_benchmark.csv'}")
