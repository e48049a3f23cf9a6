"""Cascaded network with finite-linewidth cavities: C12 against gamma/kappa."""

import numpy as np

from cascade_lab import optimize_network

for r in np.geomspace(0.1, 25, 8):
    o = optimize_network(r)
    print(f"gamma/kappa = {r:7.3f}  Omega0* = {o.omega0:.3f}  delta_q* = {o.delta_q:.3f}  "
          f"C12 = {o.C12:.4f}  C01 = {o.report.C01:.4f}")
