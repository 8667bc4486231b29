"""A tour of the Brio-Wu shock tube in the anisotropic (CGL) model.

We run the same problem three ways:

1. pure CGL (no relaxation) with the HLL solver,
2. the same with HLLI, which adds anti-diffusion on the intermediate waves,
3. the isotropic limit (tau = 1e-8), compared against the second-order
   Rusanov/MinMod oracle on a much finer grid.

Run it with ``python demos/shock_tube_tour.py [--plot]``. The oracle run takes
a minute or two on one core.
"""
import sys

import numpy as np

from cgl1d import OracleConfig, RunConfig, run_oracle, run_simulation
from cgl1d.harness import compare_to_reference, total_variation

N = 800


def describe(label, res):
    s = res.summary()
    anis = res.W[:, 4] - res.W[:, 5]
    print(f"{label:<22} steps={s['steps']:5d}  rho in [{s['min_rho']:.3f}, {s['max_rho']:.3f}]  "
          f"max|p_par - p_perp|={np.abs(anis).max():.3e}  wall={s['wall_time_s']:.1f}s")


cgl_hll = run_simulation(RunConfig(problem="rp1", order=5, solver="hll", n=N), write=False)
cgl_hlli = run_simulation(RunConfig(problem="rp1", order=5, solver="hlli", n=N), write=False)
describe("CGL, HLL", cgl_hll)
describe("CGL, HLLI", cgl_hlli)

# Without relaxation nothing ties the two pressures together, and every wave
# moves them differently.
i = np.argmax(np.abs(cgl_hll.W[:, 4] - cgl_hll.W[:, 5]))
print(f"largest anisotropy at x={cgl_hll.x[i]:+.3f}: p_par={cgl_hll.W[i, 4]:.3f}, p_perp={cgl_hll.W[i, 5]:.3f}")

# HLLI adds anti-diffusion on the intermediate waves; the two solutions agree
# away from them and differ most where those waves sit.
diff = np.abs(cgl_hll.W[:, 0] - cgl_hlli.W[:, 0])
j = diff.argmax()
print(f"HLL vs HLLI density: mean difference {diff.mean():.2e}, largest {diff[j]:.2e} at x={cgl_hll.x[j]:+.3f}")

iso = run_simulation(RunConfig(problem="rp1", order=5, solver="hlli", n=N, tau=1e-8), write=False)
describe("isotropic, HLLI", iso)
xr, Ur = run_oracle("rp1", OracleConfig(n=10000), tau=1e-8)
dist = compare_to_reference(iso.x, iso.W[:, 0], xr, Ur[:, 0])
print(f"distance to 10000-zone oracle: {dist:.2e} = {100 * dist / total_variation(Ur[:, 0]):.2f}% of TV(rho)")

if "--plot" in sys.argv:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(1, 2, figsize=(10, 4))
    ax[0].plot(xr, Ur[:, 0], "k-", lw=0.8, label="oracle")
    ax[0].plot(iso.x, iso.W[:, 0], ".", ms=2, label="isotropic limit")
    ax[0].plot(cgl_hlli.x, cgl_hlli.W[:, 0], "-", lw=0.8, label="CGL")
    ax[0].set_title("density")
    ax[0].legend()
    ax[1].plot(cgl_hlli.x, cgl_hlli.W[:, 4], label="p_par")
    ax[1].plot(cgl_hlli.x, cgl_hlli.W[:, 5], label="p_perp")
    ax[1].set_title("pressures (CGL)")
    ax[1].legend()
    plt.tight_layout()
    plt.show()
