"""Driving the sweep harness programmatically.

The same layering the pdra-bench command applies (preset, then config-file
fields, then flags) is available as a library: build a spec, shrink it for a
quick look, run it, and read the CSV back.
"""

import csv

from pdra.bench import build_spec, expand_grid, run_experiment

spec = build_spec(
    "fig2",
    config_fields={"m_antennas": (256,), "trials": 500},
    flag_fields={"master_seed": 3, "out": "demo-fig2.csv"},
)
print(f"preset fig2 shrunk to {len(expand_grid(spec))} points x {spec.trials} trials")

code = run_experiment(spec)
print(f"exit code {code}")

with open(spec.out, newline="") as fh:
    rows = list(csv.DictReader(fh))
print(f"\n{'R':>3} {'simulated':>10} {'analytic':>9}")
for row in rows:
    print(f"{row['r_roots']:>3} {float(row['p_success_sim']):>10.3f} "
          f"{float(row['p_success_analytic']):>9.3f}")
print("\nsidecar provenance:", spec.out + ".meta.json")
print("the same run from a shell:")
print("  pdra-bench --preset fig2 --trials 500 --seed 3 --out demo-fig2.csv")
