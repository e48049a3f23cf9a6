"""Finite-linewidth cascaded network: source TLS plus two target qubits.

Without the slow-qubit approximation the targets are simulated together with
the source in one ``2 x 2 x 2`` space (index 0 is the source). Each waveguide
carries the source emission ``sqrt(kappa) tau-`` into one qubit with
unidirectional coupling, so the steady state contains the source-qubit
correlations that the effective reservoir description leaves out.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from .entangle import wootters_concurrence
from .liouville import Liouvillian, Port, cascaded_coupling, dissipator, hamiltonian_term
from .models import TlsParams
from .operators import DensityMatrix, HilbertSpace, embed, partial_trace, pauli

NETWORK_SPACE = HilbertSpace((2, 2, 2))
PAIRS = {"01": (0, 1), "02": (0, 2), "12": (1, 2)}
# (pair, row, col) in the |gg>, |ge>, |eg>, |ee> basis of the reduced state
COHERENCES = {
    "gg_ee_12": ("12", 0, 3),
    "eg_ge_12": ("12", 2, 1),
    "eg_ge_01": ("01", 2, 1),
    "gg_ee_01": ("01", 0, 3),
}

GRID_OMEGA = (0.1, 6.0)
GRID_DELTA_Q = (0.0, 3.0)
GRID_POINTS = 25
MAX_SOLVES = 2000


@dataclass(frozen=True)
class NetworkParams:
    """Source parameters, symmetric qubit decay ``gamma`` and detunings ``+-delta_q``."""

    source: TlsParams
    gamma: float
    delta_q: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")


@dataclass(frozen=True)
class NetworkReport:
    concurrences: dict
    coherences: dict
    state: DensityMatrix = field(repr=False, compare=False, default=None)

    @property
    def C01(self) -> float:
        return self.concurrences["01"]

    @property
    def C02(self) -> float:
        return self.concurrences["02"]

    @property
    def C12(self) -> float:
        return self.concurrences["12"]


@dataclass(frozen=True)
class NetworkOptimum:
    gamma_over_kappa: float
    omega0: float
    delta_q: float
    C12: float
    report: NetworkReport
    n_solves: int
    boundary: bool
    grid_best: tuple = ()


@lru_cache(maxsize=1)
def _network_terms() -> dict:
    """Parameter-free superoperator pieces; the generator is linear in them."""
    sp3 = NETWORK_SPACE
    sm, sz, sx = pauli("minus"), pauli("z"), pauli("x")
    tau = embed(sm, sp3, 0)
    q = [embed(sm, sp3, 1), embed(sm, sp3, 2)]
    z = [embed(sz, sp3, k) for k in range(3)]
    return {
        "tau": tau,
        "delta0": hamiltonian_term(0.5 * z[0]),
        "omega0": hamiltonian_term(0.5 * embed(sx, sp3, 0)),
        "delta_q": hamiltonian_term(0.5 * (z[1] - z[2])),
        "decay": dissipator(tau),
        "dephase": dissipator(z[0], 0.5),
        "qubits": dissipator(q[0]) + dissipator(q[1]),
        "cascade": cascaded_coupling(tau, q[0], 1.0, 1.0) + cascaded_coupling(tau, q[1], 1.0, 1.0),
    }


def build_network(p: NetworkParams) -> Liouvillian:
    """Cascaded master equation of the source and both target qubits."""
    s = p.source
    t = _network_terms()
    L = (s.delta0 * t["delta0"] + s.omega0 * t["omega0"] + p.delta_q * t["delta_q"]
         + s.gamma_total * t["decay"] + s.gamma_phi * t["dephase"] + p.gamma * t["qubits"]
         + np.sqrt(s.kappa * p.gamma) * t["cascade"])
    L = sp.csr_matrix(L)
    L.eliminate_zeros()
    tau = t["tau"]
    return Liouvillian(NETWORK_SPACE, L, (Port(tau, s.kappa), Port(tau, s.kappa)),
                       "drive", {"model": "network", "params": p})


def analyze_network(p: NetworkParams) -> NetworkReport:
    """Pairwise concurrences and selected coherences of the network steady state."""
    rho = build_network(p).steady_state()
    reduced = {k: partial_trace(rho, v) for k, v in PAIRS.items()}
    conc = {k: wootters_concurrence(r) for k, r in reduced.items()}
    coh = {name: complex(reduced[pair].full()[i, j])
           for name, (pair, i, j) in COHERENCES.items()}
    return NetworkReport(conc, coh, rho)


def optimize_network(gamma_over_kappa: float, delta0: float = 0.0, kappa: float = 1.0,
                     grid_points: int = GRID_POINTS, max_solves: int = MAX_SOLVES,
                     xtol: float = 1e-3) -> NetworkOptimum:
    """Maximize ``C(rho_12)`` over the drive strength and qubit detuning.

    A ``grid_points x grid_points`` scan over ``omega0/kappa`` in
    ``GRID_OMEGA`` and ``delta_q/kappa`` in ``GRID_DELTA_Q`` seeds a bounded
    Nelder-Mead refinement. The search is deterministic. ``boundary`` is set
    when the optimum sits on the edge of the search box.
    """
    gamma = gamma_over_kappa * kappa
    base = TlsParams(delta0=delta0, omega0=0.0, kappa=kappa)
    count = 0

    def c12(x):
        nonlocal count
        count += 1
        w, dq = float(x[0]) * kappa, float(x[1]) * kappa
        return analyze_network(NetworkParams(replace(base, omega0=w), gamma, dq)).C12

    ws = np.linspace(*GRID_OMEGA, grid_points)
    dqs = np.linspace(*GRID_DELTA_Q, grid_points)
    grid = np.array([[c12((w, dq)) for dq in dqs] for w in ws])
    i, j = np.unravel_index(np.argmax(grid), grid.shape)
    x0 = np.array([ws[i], dqs[j]])
    bounds = [GRID_OMEGA, GRID_DELTA_Q]
    budget = max(max_solves - count, 0)
    x, best = x0, grid[i, j]
    if budget and best > 0:
        steps = np.array([0.25, 0.125])
        hi_ = np.array([b[1] for b in bounds])
        steps = np.where(x0 + steps > hi_, -steps, steps)
        simplex = [x0, x0 + [steps[0], 0], x0 + [0, steps[1]]]
        res = minimize(lambda x: -c12(x), x0, method="Nelder-Mead", bounds=bounds,
                       options={"xatol": xtol, "fatol": xtol * best,
                                "maxfev": budget,
                                "initial_simplex": simplex})
        if -res.fun >= best:
            x, best = res.x, -res.fun
    span = np.array([b[1] - b[0] for b in bounds])
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    on_edge = np.any((x - lo < 1e-3 * span) | (hi - x < 1e-3 * span))
    rep = analyze_network(NetworkParams(replace(base, omega0=x[0] * kappa), gamma, x[1] * kappa))
    return NetworkOptimum(float(gamma_over_kappa), float(x[0] * kappa), float(x[1] * kappa),
                          rep.C12, rep, count, bool(on_edge),
                          (float(ws[i]), float(dqs[j]), float(grid[i, j])))
