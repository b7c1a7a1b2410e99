"""Decay trends: the midpoint probability and coalescence exceedance.

Runs small-trial versions of the two headline experiments across a few
scales and prints the trend rows (the acceptance suite runs the full-size
versions).  Writes the midpoint rows as a decay CSV consumable by the viz
package's log-log plot.
"""

from fpplab import ExperimentConfig, coalescence_experiment, midpoint_experiment
from fpplab.reporting import fmt_float, to_json

mid_rows = []
for n in (16, 32, 64):
    cfg = ExperimentConfig(kind="midpoint", dist="unif:1:2", master_seed=100 + n,
                           trials=250, params={"u": (0, 0), "v": (n, 0), "z": (n // 2, 0)})
    rep = midpoint_experiment(cfg)
    ag = rep.aggregates
    mid_rows.append((rep.config["derived"]["D"], ag["direct_probability"], ag["direct_stderr"]))
    print(f"midpoint n={n:3d}: direct={ag['direct_probability']:.4f} "
          f"averaged={ag['averaged_probability']:.4f}")

with open("demo_midpoint_decay.csv", "w") as fh:
    fh.write("D,probability,stderr\n")
    for D, p, se in mid_rows:
        fh.write(f"{D},{fmt_float(p)},{fmt_float(se)}\n")

for ny in (32, 64):
    cfg = ExperimentConfig(kind="coalesce", dist="unif:1:2", master_seed=200 + ny,
                           trials=120, params={"y": (ny, 0), "delta": 0.0})
    rep = coalescence_experiment(cfg)
    ag = rep.aggregates
    print(f"coalesce |y|={ny:3d}: exceedance={ag['exceedance_frequency']:.3f} "
          f"[{ag['exceedance_wilson_lo']:.3f}, {ag['exceedance_wilson_hi']:.3f}]")
    with open(f"demo_coalesce_{ny}.json", "w") as fh:
        fh.write(to_json(rep.as_dict()))

print("wrote demo_midpoint_decay.csv and demo_coalesce_*.json")
