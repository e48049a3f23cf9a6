"""Exact moment dynamics of quadratic two-mode Lindbladians.

A quadratic generator is represented on the ladder vector
``c = (a1, a1^dag, a2, a2^dag)`` as

    L rho = -i[H, rho] + sum_pq K[p, q] (c_p rho c_q - {c_q c_p, rho}/2),
    H = sum_pq h[p, q] c_p c_q + sum_p l[p] c_p,

with ``[c_p, c_q] = OMEGA[p, q]``. The adjoint action of such a generator maps
ladder operators onto linear combinations of ladder operators, which gives the
drift matrix and inhomogeneity of the first moments. Second moments follow
from the product rule ``D^dag(XY) = D^dag(X) Y + X D^dag(Y) + [B, X][Y, A]``
for ``D[A, B]``; for centered fluctuations this is a Lyapunov equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .liouville import CorrelationSet
from .operators import Operator

# index of a_i (s = "-") and a_i^dag (s = "+") in the ladder vector
LADDER = {(1, "-"): 0, (1, "+"): 1, (2, "-"): 2, (2, "+"): 3}

OMEGA = np.array([[0, 1, 0, 0],
                  [-1, 0, 0, 0],
                  [0, 0, 0, 1],
                  [0, 0, -1, 0]], dtype=complex)

# quadratures (x1, p1, x2, p2) = T c
_T1 = np.array([[1, 1], [-1j, 1j]]) / np.sqrt(2)
T_QUAD = sla.block_diag(_T1, _T1)
J_SYMPL = sla.block_diag([[0, 1], [-1, 0]], [[0, 1], [-1, 0]]).astype(float)


class InstabilityError(RuntimeError):
    """Drift matrix has an eigenvalue with non-negative real part."""


class UnphysicalCovarianceError(ValueError):
    """Covariance matrix violates the bosonic uncertainty relation."""


def _idx(label) -> int:
    if isinstance(label, int):
        return label
    mode, s = label
    return LADDER[(int(mode), s)]


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """Two cavity modes with a quadratic effective generator.

    Tables are 2x2 complex arrays indexed by mode (0-based):

    * ``Gamma[i, j]`` weighs ``D[a_i, a_j]`` (and ``Gamma*`` weighs ``D[a_j^dag, a_i^dag]``),
    * ``gamma_p[i, j]`` weighs ``D[a_i^dag, a_j]``, ``gamma_m[i, j]`` weighs ``D[a_i, a_j^dag]``,
    * ``delta[i, j]`` multiplies ``a_i^dag a_j`` and ``g[i, j]`` multiplies ``a_i a_j``
      (plus ``g*`` on ``a_i^dag a_j^dag``) in the Hamiltonian,
    * ``drive[i]`` multiplies ``a_i^dag`` in the Hamiltonian (plus h.c.).

    ``raw`` optionally keeps the elimination integrals keyed by
    ``(n, m, s1, s2)`` with 1-based modes and ``s`` in ``{"+", "-"}``.
    """

    delta_c: float
    kappa: float
    Gamma: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), complex))
    g: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), complex))
    gamma_p: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), complex))
    gamma_m: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), complex))
    delta: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), complex))
    drive: np.ndarray = field(default_factory=lambda: np.zeros(2, complex))
    raw: dict | None = None
    secular: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("Gamma", "g", "gamma_p", "gamma_m", "delta"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex))
        object.__setattr__(self, "drive", np.asarray(self.drive, dtype=complex))

    def generator(self):
        """``(h, l, K)`` on the ladder vector."""
        h = np.zeros((4, 4), complex)
        l = np.zeros(4, complex)
        K = np.zeros((4, 4), complex)
        a = [0, 2]
        ad = [1, 3]
        sgn = (1.0, -1.0)
        for i in range(2):
            h[ad[i], a[i]] += sgn[i] * self.delta_c
            l[ad[i]] += self.drive[i]
            l[a[i]] += np.conj(self.drive[i])
            K[a[i], ad[i]] += self.kappa
            for j in range(2):
                h[ad[i], a[j]] += self.delta[i, j]
                h[a[i], a[j]] += self.g[i, j]
                h[ad[i], ad[j]] += np.conj(self.g[i, j])
                K[a[i], a[j]] += self.Gamma[i, j]
                K[ad[j], ad[i]] += np.conj(self.Gamma[i, j])
                K[ad[i], a[j]] += self.gamma_p[i, j]
                K[a[i], ad[j]] += self.gamma_m[i, j]
        return h, l, K

    def hermiticity_defect(self) -> float:
        """Deviation from ``delta* = delta^T``.

        The pair table needs no such relation: ``a_i a_j`` commute, so only
        ``g + g^T`` enters the Hamiltonian and it is Hermitian by construction.
        """
        return float(np.abs(self.delta.conj() - self.delta.T).max())


@dataclass(frozen=True, eq=False)
class DriftSystem:
    """``d v/dt = drift @ v + inhomogeneity`` for ``v = <c>``, plus noise ``Q``."""

    drift: np.ndarray
    inhomogeneity: np.ndarray
    noise: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.drift)

    def stable(self) -> bool:
        return bool(np.all(self.eigenvalues().real < 0))


def drift_from_generator(h, l, K, check: bool = True) -> DriftSystem:
    """Adjoint action of a quadratic generator on the ladder vector."""
    h = np.asarray(h, complex)
    l = np.asarray(l, complex)
    K = np.asarray(K, complex)
    W = OMEGA
    # i[H, c_r] = i sum h_pq (c_p W_qr + W_pr c_q) + i sum l_p W_pr
    Mh = 1j * (W.T @ h.T + W.T @ h)
    # D^dag[c_p, c_q] c_r = (W_rp c_q + W_qr c_p)/2
    Md = 0.5 * (W @ K + W.T @ K.T)
    M = Mh + Md
    f = 1j * (W.T @ l)
    Q = (W @ K @ W).T
    ds = DriftSystem(M, f, Q)
    if check:
        ev = ds.eigenvalues()
        bad = ev[ev.real >= 0]
        if bad.size:
            raise InstabilityError(f"drift eigenvalue {bad[0]:.6g} has non-negative real part")
    return ds


def drift_from_model(m: QuadraticModel, check: bool = True) -> DriftSystem:
    return drift_from_generator(*m.generator(), check=check)


@dataclass(frozen=True, eq=False)
class SecondMoments:
    """Mean ladder vector and fluctuation matrix ``sigma[r, s] = <dc_r dc_s>``."""

    mean: np.ndarray
    sigma: np.ndarray

    def raw(self) -> np.ndarray:
        """``<c_r c_s>`` including the coherent part."""
        return self.sigma + np.outer(self.mean, self.mean)

    def aa(self, i: int, j: int) -> complex:
        """``<a_i a_j>`` with 1-based modes."""
        return complex(self.raw()[_idx((i, "-")), _idx((j, "-"))])

    def ada(self, i: int, j: int) -> complex:
        """``<a_i^dag a_j>`` with 1-based modes."""
        return complex(self.raw()[_idx((i, "+")), _idx((j, "-"))])

    def covariance(self) -> np.ndarray:
        """Symmetrized quadrature covariance, vacuum = identity / 2."""
        R = T_QUAD @ self.sigma @ T_QUAD.T
        V = 0.5 * (R + R.T)
        return V.real

    def uncertainty_min(self) -> float:
        V = self.covariance()
        return float(np.linalg.eigvalsh(V + 0.5j * J_SYMPL).min())

    def validate(self, tol: float = 1e-8):
        occ = [self.ada(1, 1), self.ada(2, 2)]
        if min(o.real for o in occ) < -1e-10:
            raise UnphysicalCovarianceError(f"negative occupation {occ}")
        lam = self.uncertainty_min()
        if lam < -tol:
            raise UnphysicalCovarianceError(
                f"uncertainty relation violated (min eigenvalue {lam:.3e}); "
                "a non-secular effective model may not be completely positive, "
                "try secular=True")


def steady_second_moments(m: QuadraticModel | DriftSystem, check: bool = True) -> SecondMoments:
    ds = m if isinstance(m, DriftSystem) else drift_from_model(m)
    M, f, Q = ds.drift, ds.inhomogeneity, ds.noise
    try:
        mean = np.linalg.solve(M, -f)
        sigma = sla.solve_sylvester(M, M.T, -Q)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise InstabilityError(f"singular moment equations: {exc}") from exc
    s = SecondMoments(mean, sigma)
    if check:
        s.validate()
    return s


def lyapunov_residual(ds: DriftSystem, s: SecondMoments) -> float:
    r = ds.drift @ s.sigma + s.sigma @ ds.drift.T + ds.noise
    return float(np.abs(r).max())


def gaussian_laplace_spectrum(m: QuadraticModel, A, B, delta: float,
                              moments: SecondMoments | None = None) -> complex:
    """``int_0^inf dtau exp(-i delta tau) <dA(tau) dB>`` for ladder labels ``A``, ``B``.

    Labels are ``(mode, "-")`` for ``a_mode`` and ``(mode, "+")`` for its
    adjoint, or a raw index into the ladder vector.
    """
    ds = drift_from_model(m)
    s = moments or steady_second_moments(ds)
    col = np.linalg.solve(1j * delta * np.eye(4) - ds.drift, s.sigma[:, _idx(B)])
    return complex(col[_idx(A)])


def gaussian_correlation_set(m: QuadraticModel, dq1: float, dq2: float) -> CorrelationSet:
    """Port spectra of the two cavities, each decaying at ``kappa`` into its waveguide."""
    ds = drift_from_model(m)
    s = steady_second_moments(ds)
    cmm = np.zeros((2, 2), complex)
    cmp = np.zeros((2, 2), complex)
    for j, dq in enumerate((dq1, dq2)):
        X = np.linalg.solve(1j * dq * np.eye(4) - ds.drift, s.sigma)
        col = X[:, _idx((j + 1, "-"))]
        for i in range(2):
            cmm[i, j] = m.kappa * col[_idx((i + 1, "-"))]
            cmp[i, j] = m.kappa * col[_idx((i + 1, "+"))]
    eps = np.sqrt(m.kappa) * np.array([s.mean[0], s.mean[2]])
    return CorrelationSet((float(dq1), float(dq2)), cmm, cmp, eps)


def log_negativity(s: SecondMoments | np.ndarray) -> float:
    """Two-mode Gaussian logarithmic negativity (base 2)."""
    V = s.covariance() if isinstance(s, SecondMoments) else np.asarray(s, float)
    if V.shape != (4, 4):
        raise UnphysicalCovarianceError(f"expected 4x4 covariance, got {V.shape}")
    if np.linalg.eigvalsh(V + 0.5j * J_SYMPL).min() < -1e-8:
        raise UnphysicalCovarianceError("covariance violates the uncertainty relation")
    P = np.diag([1.0, 1.0, 1.0, -1.0])
    Vt = P @ V @ P
    nu = np.abs(np.linalg.eigvals(1j * J_SYMPL @ Vt))
    nu_min = nu.min()
    return float(max(0.0, -np.log2(2.0 * nu_min)))


def moments_from_state(rho: Operator, a1: Operator, a2: Operator) -> SecondMoments:
    """First and second moments of two modes evaluated in a (truncated) state."""
    c = [a1, a1.dag(), a2, a2.dag()]
    mean = np.array([op.expect(rho) for op in c])
    raw = np.empty((4, 4), complex)
    for r in range(4):
        for s_ in range(4):
            raw[r, s_] = (c[r] @ c[s_]).expect(rho)
    return SecondMoments(mean, raw - np.outer(mean, mean))


def tms_moments(r: float, phase: float = 0.0) -> SecondMoments:
    """Pure two-mode squeezed vacuum ``<a1 a2> = e^{i phase} sinh r cosh r``."""
    n = np.sinh(r) ** 2
    m = np.exp(1j * phase) * np.sinh(r) * np.cosh(r)
    sig = np.zeros((4, 4), complex)
    # <a a^dag> = n + 1, <a^dag a> = n
    sig[0, 1] = sig[2, 3] = n + 1
    sig[1, 0] = sig[3, 2] = n
    sig[0, 2] = sig[2, 0] = m
    sig[1, 3] = sig[3, 1] = np.conj(m)
    return SecondMoments(np.zeros(4, complex), sig)
