"""Filtered emitter: Purcell model against two explicit cavities at theta = pi/4."""

import numpy as np

from cascade_lab.sweep import evaluate_point

th = np.pi / 4
print(f"{'Omega_tilde':>11} {'Purcell':>9} {'cavities':>9}")
for wt in (1.0, 3.0, 10.0, 30.0, 100.0):
    pt = {"omega_tilde": wt, "theta": th, "g": 0.1}
    pur = evaluate_point("purcell", pt)["Cd"]
    full = evaluate_point("full-cavity", pt, n_fock=3)["Cd"]
    print(f"{wt:11.1f} {pur:9.5f} {full:9.5f}")
