"""Monte Carlo vs closed form on a reduced grid.

Runs the link-level simulator at a desk-friendly trial count and puts the
empirical success rates next to the analytic curve.  Larger antenna arrays
track the model more closely; see the simulator docs for why.
"""

from pdra import (
    ChannelModelSpec,
    FixedActivity,
    ScenarioConfig,
    analytic_reference,
    build_pool,
    run_campaign,
)

config = ScenarioConfig(
    m_antennas=128,
    activity=FixedActivity(10),
    pool=build_pool(839, n_roots=1, n_ss=32, l=2),
    channel=ChannelModelSpec(kind="iid", m_antennas=128),
    snr_db=-12.0,
    alpha_th_db=5.0,
    n_zc=839,
    trials=3000,
    master_seed=2024,
)

grid = [
    {"r_roots": r, "m_antennas": m}
    for r in (1, 2, 3, 4)
    for m in (128, 512)
]

print(f"{config.trials} trials per point, N=10 active, SNR -12 dB, threshold 5 dB")
print(f"{'R':>3} {'M':>5} {'empirical':>10} {'95% CI':>19} {'analytic':>9}")
results = run_campaign(config, grid, threads=1)
for point, res in zip(grid, results):
    lo, hi = res.wilson_ci_95
    print(
        f"{point['r_roots']:>3} {point['m_antennas']:>5} "
        f"{res.empirical_p_success:>10.4f} [{lo:.4f}, {hi:.4f}]   "
        f"{res.analytic_p_success:>9.4f}"
    )
print("\nthe M=512 rows sit on the model; M=128 falls slightly short because")
print("finite arrays miss the detection threshold in a fraction of trials")