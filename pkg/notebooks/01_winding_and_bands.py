"""
Winding number of the two-site chain
====================================

The two-site chain has bonds J1 = g0 - g1 cos(theta) and J2 = g0 + g1 cos(theta).
Its Bloch vector (d_x, d_y) = (J1 + J2 cos q, J2 sin q) traces a circle of
radius |J2| around (J1, 0); the winding number counts whether the origin is
inside.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from topochain import ChainSpec, band_spectrum, ssh_couplings
from topochain import winding_number_analytic, winding_number_integral

FIGURES = Path(__file__).resolve().parent / "figures"
FIGURES.mkdir(exist_ok=True)

# %% [markdown]
# Two representative points: one on each side of theta = pi/2.

# %%
for theta in (0.1 * np.pi, 0.9 * np.pi):
    J1, J2 = ssh_couplings(1.0, 1.0, theta)
    print(f"theta={theta / np.pi:.1f}pi  J1={J1:.6f}  J2={J2:.6f}  "
          f"nu={winding_number_analytic(1, 1, theta)}  "
          f"integral={winding_number_integral(J1, J2):.12f}")

# %% [markdown]
# The loop of d(q) for both phases. The origin sits inside only in the
# topological case.

# %%
q = np.linspace(0, 2 * np.pi, 400)
fig, ax = plt.subplots(figsize=(4, 4))
for theta, style in ((0.1 * np.pi, "-"), (0.9 * np.pi, "--")):
    J1, J2 = ssh_couplings(1.0, 1.0, theta)
    ax.plot(J1 + J2 * np.cos(q), J2 * np.sin(q), style, label=f"theta={theta / np.pi:.1f}pi")
ax.plot(0, 0, "k+")
ax.set_aspect("equal")
ax.set_xlabel("d_x")
ax.set_ylabel("d_y")
ax.legend()
fig.savefig(FIGURES / "winding_loops.png", dpi=120, bbox_inches="tight")

# %% [markdown]
# Phase diagram over theta at g0 = g1: the integral follows the analytic
# step and the bulk gap 2 min|d| closes at theta = pi/2.

# %%
thetas = np.linspace(0.01, 0.99, 50) * np.pi  # skips the critical point pi/2
nus, gaps = [], []
for th in thetas:
    J1, J2 = ssh_couplings(1.0, 1.0, th)
    nus.append(winding_number_integral(J1, J2))
    gaps.append(band_spectrum(ChainSpec(2, 1, 1.0, 1.0, th), nq=256).min_gap())

fig, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(5, 4))
a1.plot(thetas / np.pi, nus, "o-", ms=3)
a1.set_ylabel("nu")
a2.plot(thetas / np.pi, gaps)
a2.set_ylabel("band gap")
a2.set_xlabel("theta / pi")
fig.savefig(FIGURES / "winding_phase_diagram.png", dpi=120, bbox_inches="tight")
