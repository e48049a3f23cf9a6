"""Quadratic cavity model: C_d against cooperativity with the drive angle optimized."""

import numpy as np

from cascade_lab.sweep import evaluate_point, optimize_point

for C in np.geomspace(1, 1000, 7):
    base = {"omega_tilde": 500.0, "g": 0.1, "C": C}
    rec = optimize_point(lambda x: evaluate_point("qms", {**base, "theta": x["theta"]})["Cd"],
                         ["theta"], {"theta": (0.0, np.pi / 2)})
    print(f"C = {C:8.2f}   theta* = {rec.x['theta']:.4f}   C_d* = {rec.value:.4f}")
