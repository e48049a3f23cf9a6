"""From correlation spectra to reservoir parameters and qubit entanglement.

The target qubits see the source through the coefficients ``N_i`` and ``M``
of an equivalent thermal two-mode-squeezed (TMS) reservoir. This module maps
spectra onto those coefficients, computes the effective squeezing ``r_eff``
and purity ``mu_eff``, the distributable concurrence, and builds the qubit
master equations used to cross-check the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liouville import (CorrelationSet, Liouvillian, generalized_dissipator, spost,
                        spre, sprepost)
from .operators import DensityMatrix, HilbertSpace, Operator, embed, pauli

MU_CLIP = 1e-6
PROBE_TOL = 1e-9

QUBITS = HilbertSpace((2, 2))


class UnphysicalSpectraError(ValueError):
    """Spectra do not correspond to a valid TMS reservoir."""


class AsymmetricProbeError(ValueError):
    """Probe detunings are not mirror images of each other."""


@dataclass(frozen=True)
class TMSParams:
    """Occupations ``N1``, ``N2`` and pair correlation ``M = |M| e^{i Theta}``."""

    N1: float
    N2: float
    M: complex

    @property
    def theta(self) -> float:
        return float(np.angle(self.M))

    def is_physical(self, tol: float = 1e-10) -> bool:
        return (min(self.N1, self.N2) >= -tol
                and abs(self.M) ** 2 <= self.N1 * self.N2 + min(self.N1, self.N2) + tol)


@dataclass(frozen=True)
class EffectiveTMS:
    r_eff: float
    mu_eff: float
    theta: float = 0.0


def tms_from_spectra(c: CorrelationSet) -> TMSParams:
    """``N_i = 2 Re C^{ii}_{-+}(dq_i)``, ``M = C^{12}_{--}(dq_2) + C^{21}_{--}(dq_1)``."""
    dq1, dq2 = c.detunings
    if abs(dq1 + dq2) > PROBE_TOL * max(1.0, abs(dq1), abs(dq2)):
        raise AsymmetricProbeError(
            f"probes ({dq1}, {dq2}) are not mirrored; use qubit_me_general")
    N1 = 2.0 * c.cmp[0, 0].real
    N2 = 2.0 * c.cmp[1, 1].real
    M = complex(c.cmm[0, 1] + c.cmm[1, 0])
    return TMSParams(float(N1), float(N2), M)


def effective_tms(p: TMSParams) -> EffectiveTMS:
    """Squeezing strength and purity of the equivalent two-mode state.

    Raises
    ------
    UnphysicalSpectraError
        If ``2|M| >= N1 + N2 + 1`` or the purity exceeds one by more than
        ``MU_CLIP``; smaller excesses are treated as roundoff and clipped.
    """
    absM = abs(p.M)
    x = 2.0 * absM / (p.N1 + p.N2 + 1.0)
    if not 0.0 <= x < 1.0:
        raise UnphysicalSpectraError(f"2|M|/(N1+N2+1) = {x:.6g} outside [0, 1)")
    den = (1.0 + 2.0 * p.N1) * (1.0 + 2.0 * p.N2) - 4.0 * absM ** 2
    if den <= 0:
        raise UnphysicalSpectraError(f"purity denominator {den:.3e} is not positive")
    mu = 1.0 / den
    if mu > 1.0:
        if mu - 1.0 > MU_CLIP:
            raise UnphysicalSpectraError(f"effective purity {mu:.8f} exceeds 1")
        mu = 1.0
    return EffectiveTMS(0.5 * float(np.arctanh(x)), float(mu), p.theta)


def concurrence_distributable(e: EffectiveTMS) -> float:
    """``max(|mu tanh 2r| - (1 - mu)/2, 0)``."""
    return max(abs(e.mu_eff * np.tanh(2.0 * e.r_eff)) - 0.5 * (1.0 - e.mu_eff), 0.0)


def cd_from_spectra(c: CorrelationSet) -> tuple[float, TMSParams, EffectiveTMS]:
    p = tms_from_spectra(c)
    e = effective_tms(p)
    return concurrence_distributable(e), p, e


def _qubit_ops():
    sm = pauli("minus")
    return [embed(sm, QUBITS, i) for i in (0, 1)]


def qubit_me_resonant(p: TMSParams, gamma: float) -> Liouvillian:
    """Two qubits coupled to a thermal TMS reservoir, in the probe frame."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    s1m, s2m = _qubit_ops()
    s1p, s2p = s1m.dag(), s2m.dag()
    collapse = []
    for sm, N in ((s1m, p.N1), (s2m, p.N2)):
        collapse += [(sm, gamma * (N + 1.0)), (sm.dag(), gamma * N)]
    M = p.M
    extra = [
        generalized_dissipator(s1p, s2p, -gamma * M),
        generalized_dissipator(s2p, s1p, -gamma * M),
        generalized_dissipator(s2m, s1m, -gamma * np.conj(M)),
        generalized_dissipator(s1m, s2m, -gamma * np.conj(M)),
    ]
    return Liouvillian.build(None, collapse, extra=extra, frame="probe",
                             meta={"N1": p.N1, "N2": p.N2, "M": M, "gamma": gamma})


def qubit_me_general(c: CorrelationSet, gamma1: float, gamma2: float,
                     resonant_only: bool = False, lamb_shift: bool = True) -> Liouvillian:
    """Born-Markov master equation of the target qubits in the drive frame.

    Parameters
    ----------
    c : CorrelationSet
        Port spectra at the probe detunings ``c.detunings``.
    gamma1, gamma2 : float
        Waveguide decay rates of the target qubits.
    resonant_only : bool
        Move to the frame rotating with the qubit detunings and keep only the
        time-independent terms there. Otherwise all terms are kept static in
        the drive frame.
    lamb_shift : bool
        Offset the bare qubit detunings so that the source-induced Lamb shift
        ``-2 gamma_i Im C^{ii}_{-+}`` is compensated and the qubits stay at
        the requested probe detunings. The shifts are stored in ``meta``.
    """
    gam = np.array([gamma1, gamma2], dtype=float)
    if np.any(gam < 0):
        raise ValueError("qubit decay rates must be non-negative")
    sm = _qubit_ops()
    sz = [embed(pauli("z"), QUBITS, i) for i in (0, 1)]
    dq = np.array(c.detunings, dtype=float)
    scale = max(1.0, float(np.abs(dq).max()))
    lamb = -2.0 * gam * np.array([c.cmp[0, 0].imag, c.cmp[1, 1].imag])
    det = np.zeros(2) if resonant_only else dq.copy()
    if lamb_shift:
        det = det - lamb
    H = sum(0.5 * det[i] * sz[i] for i in range(2))
    terms = []
    for i in range(2):
        if resonant_only and abs(dq[i]) > PROBE_TOL * scale:
            continue
        # sqrt(gamma)[eps* s- - eps s+, .] written as -i[H_d, .]
        e = np.sqrt(gam[i]) * c.eps[i]
        Hd = 1j * (np.conj(e) * sm[i] - e * sm[i].dag())
        H = H + Hd
    lowering = {+1: sm, -1: [s.dag() for s in sm]}  # sigma^{-s}
    for s1 in (+1, -1):
        for s2 in (+1, -1):
            coef = c.coefficient("+" if s1 > 0 else "-", "+" if s2 > 0 else "-")
            for i in range(2):
                for j in range(2):
                    w = np.sqrt(gam[i] * gam[j]) * coef[i, j] * s1 * s2
                    if w == 0:
                        continue
                    if resonant_only and abs(s1 * dq[j] + s2 * dq[i]) > PROBE_TOL * scale:
                        continue
                    terms.append(w * _double_commutator(lowering[s1][j], lowering[s2][i]))
    collapse = [(sm[i], gam[i]) for i in range(2)]
    meta = {"lamb_shifts": tuple(lamb), "resonant_only": resonant_only,
            "detunings": tuple(dq)}
    return Liouvillian.build(H, collapse, extra=terms,
                             frame="probe" if resonant_only else "drive", meta=meta)


def _double_commutator(B: Operator, A: Operator):
    """Superoperator of ``rho -> [[rho, B], A]``."""
    # rho B A - B rho A - A rho B + A B rho
    return spost(B @ A) - sprepost(B, A) - sprepost(A, B) + spre(A @ B)


_YY = np.kron(pauli("y").full(), pauli("y").full())


def wootters_concurrence(rho: DensityMatrix | np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix."""
    if isinstance(rho, Operator):
        if rho.space.size != 4 or len(rho.dims) != 2:
            raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")
        r = rho.full()
    else:
        r = np.asarray(rho, dtype=complex)
        DensityMatrix(r, QUBITS)
    # with rho = W W^dag the lambdas are the singular values of W^T (y x y) W,
    # which avoids square roots of roundoff-level eigenvalues of rho rho~
    w, V = np.linalg.eigh(0.5 * (r + r.conj().T))
    w = np.where(w > 1e-14 * max(w.max(), 1e-300), w, 0.0)
    W = V * np.sqrt(w)
    lam = np.linalg.svd(W.T @ _YY @ W, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))
