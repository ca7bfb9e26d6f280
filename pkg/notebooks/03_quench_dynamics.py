"""
Quench dynamics and winding readout
===================================

A single excitation placed on an a-site in the middle of a short chain spreads
under the static Hamiltonian. The CED measured from the starting cell
oscillates about nu/2, and at the critical times the oscillation term is
close to zero, so 2 CED(t_c) reads out nu from one time point.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from topochain import ChainSpec, DisorderSpec, critical_times, run_quench, ssh_couplings
from topochain import time_averaged_ced, winding_from_critical_time
from topochain.dynamics import edge_arrival_time

FIGURES = Path(__file__).resolve().parent / "figures"
FIGURES.mkdir(exist_ok=True)

# %%
fig, axes = plt.subplots(1, 2, figsize=(9, 3), sharey=True)
for ax, theta in zip(axes, (0.1 * np.pi, 0.9 * np.pi)):
    J1, J2 = ssh_couplings(1.0, 1.0, theta)
    tc = critical_times(J1, J2, s_max=3)
    for L in (4, 8, 16):
        spec = ChainSpec(2, L // 2, 1.0, 1.0, theta)
        trace = run_quench(spec, t_max=10.0)
        ax.plot(trace.times, trace.relative, label=f"L={L}")
        print(f"theta={theta / np.pi:.1f}pi L={L:2d}  avg(T=50)="
              f"{time_averaged_ced(run_quench(spec)):+.4f}  "
              f"2 CED(t_c)={winding_from_critical_time(spec):+.4f}")
    for t in tc:
        ax.axvline(t, color="grey", ls=":", lw=0.8)
    ax.set_title(f"theta = {theta / np.pi:.1f} pi")
    ax.set_xlabel("t g1")
axes[0].set_ylabel("CED - x0")
axes[0].legend()
fig.savefig(FIGURES / "quench_traces.png", dpi=120, bbox_inches="tight")

# %% [markdown]
# The time average settles within a few hundredths of nu/2 after a few tens of
# 1/g1, before the fastest Bloch component reaches a chain end. Longer windows
# include reflections, which barely move the average.

# %%
spec = ChainSpec(2, 8, 1.0, 1.0, 0.1 * np.pi)
print(f"fastest component reaches an end at t = {edge_arrival_time(spec, 5):.1f}")
trace = run_quench(spec, t_max=200.0)
for T in (10, 25, 50, 100, 200):
    keep = trace.times <= T
    sub = type(trace)(trace.times[keep], trace.values[keep], trace.relative[keep])
    print(f"T={T:4d}  average={time_averaged_ced(sub):.5f}")

# %% [markdown]
# Bond disorder of strength 0.2 g1, averaged over 30 realizations, leaves both
# readouts in place.

# %%
dis = DisorderSpec(W=0.2, seed=0, samples=30)
for theta in (0.1 * np.pi, 0.9 * np.pi):
    spec = ChainSpec(2, 4, 1.0, 1.0, theta)
    tr = run_quench(spec, disorder=dis)
    print(f"theta={theta / np.pi:.1f}pi  disordered avg={time_averaged_ced(tr):+.4f}  "
          f"2 CED(t_c)={winding_from_critical_time(spec, disorder=dis):+.4f}")
