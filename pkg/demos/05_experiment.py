#!/usr/bin/env python3
"""A small experiment ensemble: traces, summary, and the variant comparison.

Runs both solver variants over a handful of generated instances with derived
seeds, writes one CSV trace per run, and prints the summary table. Everything
is reproducible: rerunning this script yields byte-identical outputs.
"""

import tempfile
from pathlib import Path

from cdcop.benchmarks import BenchSpec
from cdcop.experiment import ExperimentConfig, emit_anytime_table, read_trace_csv, run_experiment
from cdcop.oracle import check_anytime
from cdcop.swarm import SwarmConfig

with tempfile.TemporaryDirectory() as tmp:
    out_dir = Path(tmp) / "runs"
    config = ExperimentConfig(
        swarm=SwarmConfig(num_particles=50, t_max=150),
        variants=["pcd", "pcd_crossover"],
        bench=BenchSpec("er", n=30, p=0.2),
        num_instances=5,
        repeats=4,
        master_seed=17,
        out_dir=out_dir,
    )
    summary = run_experiment(config)

    files = sorted(out_dir.iterdir())
    print(f"wrote {len(files)} files; first few:")
    for f in files[:4]:
        print("  ", f.name)

    print("\nper-variant results:")
    print(emit_anytime_table(summary))
    print("\nwin rate (crossover vs plain):",
          summary["win_rate"]["pcd_crossover_vs_pcd"])
    print("invariant checks passed:", summary["all_checks_passed"])

    # trace files parse back losslessly and stay monotone
    cols = read_trace_csv(files[0])
    print(f"\n{files[0].name}: {len(cols['cycle'])} cycles, "
          f"final cost {cols['g_best_cost'][-1]:.6g}, "
          f"anytime ok: {check_anytime(cols['g_best_cost']) is None}")
