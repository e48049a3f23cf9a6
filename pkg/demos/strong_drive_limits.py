"""Bare emitter: numerical reservoir parameters against the strong-drive formulas."""

import numpy as np

from cascade_lab import TlsParams, bare_tls, cd_from_spectra, correlation_set

wt = 1e3
print(f"{'theta':>7} {'N num':>10} {'N formula':>10} {'|M| num':>10} {'|M| formula':>11} {'C_d':>8}")
for th in np.linspace(0.2, np.pi / 2, 6):
    L = bare_tls(TlsParams.from_dressed(wt, th))
    cd, tms, _ = cd_from_spectra(correlation_set(L, wt, -wt))
    N = 4 * np.sin(th) ** 4 / (4 * np.cos(2 * th) + 29 - np.cos(4 * th))
    M = abs(np.sin(th) ** 2 / (np.cos(2 * th) - 5))
    print(f"{th:7.3f} {tms.N1:10.6f} {N:10.6f} {abs(tms.M):10.6f} {M:11.6f} {cd:8.5f}")
