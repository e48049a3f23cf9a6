"""Lindblad superoperators, stationary states and correlation spectra.

Vectorization is column stacking: ``vec(rho) = rho.ravel(order="F")`` and
``vec(A @ X @ B) = kron(B.T, A) @ vec(X)``. Every superoperator formula in
this module is written for that convention.

Two-time correlations follow from the quantum regression theorem,

    int_0^inf dtau exp(-i delta tau) <A(tau) B(0)>_ss
        = Tr[A (i delta - L)^{-1} (B rho_ss)],

evaluated with centered operators ``A - <A>``, ``B - <B>`` so that the
stationary eigenvalue of ``L`` never enters the resolvent. The linear solves
are restricted to the weakly connected blocks of ``L`` touched by the
right-hand side, which exploits any U(1) symmetry of a model without having
to declare it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .operators import DensityMatrix, HilbertSpace, Operator, identity

DENSE_SOLVE_LIMIT = 1200
KERNEL_CHECK_LIMIT = 256
SINGULAR_SHIFT = 1e-10


class SteadyStateError(RuntimeError):
    """Base class for stationary-state failures."""


class DegenerateSteadyStateError(SteadyStateError):
    """The Liouvillian has more than one stationary state."""


class SingularSystemError(SteadyStateError):
    """The linear system for the stationary state could not be factorized."""


class NearSingularResolventWarning(RuntimeWarning):
    """A probe detuning sits on an undamped eigenvalue of the Liouvillian."""


# --- superoperator primitives --------------------------------------------------


def _mat(op) -> sp.csr_matrix:
    return op.sparse() if isinstance(op, Operator) else sp.csr_matrix(op)


def _eye(d: int) -> sp.csr_matrix:
    return sp.identity(d, dtype=complex, format="csr")


def spre(A) -> sp.csr_matrix:
    """``X -> A X``."""
    a = _mat(A)
    return sp.kron(_eye(a.shape[0]), a, format="csr")


def spost(B) -> sp.csr_matrix:
    """``X -> X B``."""
    b = _mat(B)
    return sp.kron(b.T, _eye(b.shape[0]), format="csr")


def sprepost(A, B) -> sp.csr_matrix:
    """``X -> A X B``."""
    return sp.kron(_mat(B).T, _mat(A), format="csr")


def hamiltonian_term(H: Operator) -> sp.csr_matrix:
    """``-i[H, .]`` as a superoperator."""
    if not H.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    return -1j * (spre(H) - spost(H))


def generalized_dissipator(A: Operator, B: Operator, weight: complex = 1.0) -> sp.csr_matrix:
    """``weight * (A . B - {B A, .}/2)``."""
    if isinstance(A, Operator) and isinstance(B, Operator):
        A._check(B)
    ba = _mat(B) @ _mat(A)
    return weight * (sprepost(A, B) - 0.5 * spre(ba) - 0.5 * spost(ba))


def dissipator(A: Operator, rate: float = 1.0) -> sp.csr_matrix:
    """``rate * D[A]`` with ``D[A] = A . A^dag - {A^dag A, .}/2``."""
    if rate < 0:
        raise ValueError(f"dissipator rate must be non-negative, got {rate}")
    return generalized_dissipator(A, A.dag(), rate)


def cascaded_coupling(O: Operator, sigma_minus: Operator, kappa: float,
                      gamma: float) -> sp.csr_matrix:
    """Unidirectional coupling ``sqrt(kappa gamma)([O ., s+] + [s-, . O^dag])``.

    ``O`` and ``sigma_minus`` must already be embedded in the joint
    source-plus-qubits space.
    """
    if kappa < 0 or gamma < 0:
        raise ValueError("cascaded coupling rates must be non-negative")
    amp = np.sqrt(kappa * gamma)
    sp_ = sigma_minus.dag()
    od = O.dag()
    term = (sprepost(O, sp_) - spre(sp_ @ O) + sprepost(sigma_minus, od)
            - spost(od @ sigma_minus))
    return amp * term


def vec(rho) -> np.ndarray:
    m = rho.full() if isinstance(rho, Operator) else np.asarray(rho)
    return m.ravel(order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


# --- Liouvillian ---------------------------------------------------------------


@dataclass(frozen=True)
class Port:
    """Jump operator ``op`` feeding a waveguide with rate ``rate``.

    ``frequency`` is the offset of the model frame from the drive frame for
    this port: ``op_drive(t) = op_model(t) * exp(-i frequency t)``.
    """

    op: Operator
    rate: float
    frequency: float = 0.0


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Superoperator on ``space`` plus the waveguide ports of the source."""

    space: HilbertSpace
    superop: sp.csr_matrix
    ports: tuple[Port, ...] = ()
    frame: str = "drive"
    meta: dict = field(default_factory=dict)

    @classmethod
    def build(cls, H: Operator | None, collapse: Sequence[tuple[Operator, float]] = (),
              ports: Sequence[Port] = (), extra: Sequence[sp.spmatrix] = (),
              frame: str = "drive", meta: dict | None = None) -> "Liouvillian":
        """Assemble ``-i[H,.] + sum rate D[A] + sum extra``."""
        space = H.space if H is not None else collapse[0][0].space
        d = space.size
        L = sp.csr_matrix((d * d, d * d), dtype=complex)
        if H is not None:
            L = L + hamiltonian_term(H)
        for A, rate in collapse:
            if rate:
                L = L + dissipator(A, rate)
        for term in extra:
            L = L + term
        L = sp.csr_matrix(L)
        L.eliminate_zeros()
        return cls(space, L, tuple(ports), frame, dict(meta or {}))

    @property
    def dim(self) -> int:
        return self.space.size

    def dense(self) -> np.ndarray:
        return self.superop.toarray()

    def apply(self, rho) -> np.ndarray:
        return unvec(self.superop @ vec(rho), self.dim)

    @property
    def rate_scale(self) -> float:
        rates = [p.rate for p in self.ports if p.rate > 0]
        return max(rates) if rates else 1.0

    def __add__(self, other):
        if isinstance(other, Liouvillian):
            other = other.superop
        return Liouvillian(self.space, sp.csr_matrix(self.superop + other),
                           self.ports, self.frame, dict(self.meta))

    @cached_property
    def _blocks(self) -> tuple[int, np.ndarray]:
        pattern = sp.csr_matrix(self.superop, copy=True)
        pattern.data = np.abs(pattern.data)
        pattern.eliminate_zeros()
        return connected_components(pattern, directed=True, connection="weak")

    @cached_property
    def _trace_row(self) -> np.ndarray:
        return vec(identity(self.space).full())

    def block_indices(self, support: np.ndarray) -> np.ndarray:
        """Indices of all blocks that intersect ``support``."""
        _, labels = self._blocks
        wanted = np.unique(labels[support])
        return np.flatnonzero(np.isin(labels, wanted))

    @cached_property
    def _stationary(self):
        return _solve_stationary(self)

    def steady_state(self) -> DensityMatrix:
        return self._stationary[0]

    @property
    def stationary_block(self) -> np.ndarray:
        return self._stationary[1]

    def expect(self, op: Operator) -> complex:
        return op.expect(self.steady_state())


def _solve_stationary(L: Liouvillian):
    d = L.dim
    _, labels = L._blocks
    diag = np.arange(d) * (d + 1)
    diag_labels = np.unique(labels[diag])
    if diag_labels.size != 1:
        raise DegenerateSteadyStateError(
            f"populations split over {diag_labels.size} invariant blocks")
    idx = np.flatnonzero(labels == diag_labels[0])
    sub = L.superop[idx][:, idx].tocsr()
    pos = {k: i for i, k in enumerate(idx)}
    trace_cols = np.array([pos[k] for k in diag])
    n = idx.size
    if n <= KERNEL_CHECK_LIMIT:
        s = np.linalg.svd(sub.toarray(), compute_uv=False)
        scale = max(s[0], 1e-300)
        if n > 1 and s[-2] < 1e-10 * scale:
            raise DegenerateSteadyStateError(
                f"Liouvillian kernel is at least two-dimensional "
                f"(singular values {s[-2]:.2e}, {s[-1]:.2e})")
    # replace the first population equation by the trace condition
    a = sub.tolil()
    r0 = trace_cols[0]
    a.rows[r0] = []
    a.data[r0] = []
    a = a.tocsr()
    trace = sp.csr_matrix((np.ones(d), (np.full(d, r0), trace_cols)), shape=(n, n))
    a = (a + trace).tocsr()
    rhs = np.zeros(n, dtype=complex)
    rhs[r0] = 1.0
    x = _linear_solve(a, rhs, SingularSystemError)
    resid = np.linalg.norm(sub @ x)
    if not np.isfinite(resid) or resid > 1e-8 * max(1.0, abs(sub).max()):
        raise SingularSystemError(f"stationary residual {resid:.2e}")
    v = np.zeros(d * d, dtype=complex)
    v[idx] = x
    rho = unvec(v, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return DensityMatrix(rho, L.space), idx


def _linear_solve(a, rhs, error=SingularSystemError):
    n = a.shape[0]
    try:
        if n <= DENSE_SOLVE_LIMIT:
            am = a.toarray() if sp.issparse(a) else a
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                return sla.solve(am, rhs)
        return spla.splu(sp.csc_matrix(a)).solve(rhs)
    except (np.linalg.LinAlgError, sla.LinAlgWarning, RuntimeError) as exc:
        raise error(str(exc)) from exc


def steady_state(L: Liouvillian) -> DensityMatrix:
    """Unique stationary state of ``L`` (cached on the Liouvillian)."""
    return L.steady_state()


# --- correlation spectra -------------------------------------------------------


MEAN_FLOOR = 1e-13


def _centered(op: Operator, rho: DensityMatrix) -> Operator:
    mean = op.expect(rho)
    # symmetry-forbidden means come out as roundoff; keep them exactly zero so
    # the right-hand side stays inside its own invariant block
    scale = abs(op.data).max() if op.is_sparse else np.abs(op.data).max()
    if abs(mean) <= MEAN_FLOOR * max(scale, 1.0):
        return op
    return op - mean * identity(op.space)


def resolvent_apply(L: Liouvillian, y: np.ndarray, delta: float) -> np.ndarray:
    """Solve ``(i delta - L) x = y`` for traceless ``y``; returns ``x`` with ``Tr x = 0``.

    The stationary direction is removed with a bordered system, so ``delta = 0``
    is regular whenever the stationary state is unique.
    """
    support = np.flatnonzero(np.abs(y) > 0)
    n_all = L.dim ** 2
    if support.size == 0:
        return np.zeros(n_all, dtype=complex)
    idx = L.block_indices(support)
    stat = L.stationary_block
    bordered = np.isin(stat[0], idx)
    sub = L.superop[idx][:, idx]
    n = idx.size
    shift = 0.0
    x = None
    for attempt in range(2):
        a = (1j * delta + shift) * sp.identity(n, dtype=complex, format="csr") - sub
        rhs = y[idx]
        if bordered:
            rho_v = vec(L.steady_state())[idx]
            tr = L._trace_row[idx]
            a = sp.bmat([[a, sp.csr_matrix(rho_v[:, None])],
                         [sp.csr_matrix(tr[None, :]), None]], format="csr")
            rhs = np.concatenate([rhs, [0.0]])
        try:
            x = _linear_solve(a, rhs, np.linalg.LinAlgError)
            if np.all(np.isfinite(x)) and np.abs(x).max() < 1e12 * max(1.0, np.abs(rhs).max()):
                break
        except np.linalg.LinAlgError:
            pass
        x = None
        if attempt == 0:
            shift = SINGULAR_SHIFT * L.rate_scale
            warnings.warn(f"resolvent near-singular at delta={delta!r}; "
                          f"regularizing with shift {shift:.1e}",
                          NearSingularResolventWarning, stacklevel=3)
    if x is None:
        raise SingularSystemError(f"resolvent singular at delta={delta!r} even after shift")
    out = np.zeros(n_all, dtype=complex)
    out[idx] = x[:n]
    return out


def laplace_correlation(L: Liouvillian, A: Operator | Sequence[Operator], B: Operator,
                        delta: float):
    """``int_0^inf dtau exp(-i delta tau) <Abar(tau) Bbar>_ss``.

    ``A`` may be a sequence of operators sharing the same ``B`` and ``delta``;
    the resolvent is then solved once and an array is returned.
    """
    rho = L.steady_state()
    bbar = _centered(B, rho)
    y = vec(bbar @ rho)
    x = resolvent_apply(L, y, delta)
    many = not isinstance(A, Operator)
    ops = list(A) if many else [A]
    # Tr[A X] = vec(A^T) . vec(X); x is traceless so centering A is implicit
    vals = np.array([np.dot(vec(a.trans()), x) for a in ops])
    return vals if many else complex(vals[0])


@dataclass(frozen=True)
class CorrelationSet:
    """Laplace-transformed port correlations at the probe detunings.

    ``cmm[i, j] = C^{ij}_{--}(delta_j)`` and ``cmp[i, j] = C^{ij}_{-+}(delta_j)``,
    both including the ``sqrt(kappa_i kappa_j)`` prefactor. ``eps[i]`` is the
    coherent amplitude ``sqrt(kappa_i) <O_i>_ss``.
    """

    detunings: tuple[float, float]
    cmm: np.ndarray
    cmp: np.ndarray
    eps: np.ndarray

    @property
    def cpp(self) -> np.ndarray:
        return self.cmm.conj()

    @property
    def cpm(self) -> np.ndarray:
        return self.cmp.conj()

    def coefficient(self, s1: str, s2: str) -> np.ndarray:
        return {("-", "-"): self.cmm, ("-", "+"): self.cmp,
                ("+", "+"): self.cpp, ("+", "-"): self.cpm}[(s1, s2)]

    @classmethod
    def zeros(cls, dq1: float = 0.0, dq2: float = 0.0) -> "CorrelationSet":
        z = np.zeros((2, 2), dtype=complex)
        return cls((dq1, dq2), z, z.copy(), np.zeros(2, dtype=complex))


def correlation_set(L: Liouvillian, dq1: float, dq2: float) -> CorrelationSet:
    """All port spectra entering the effective qubit master equation."""
    if len(L.ports) != 2:
        raise ValueError("correlation_set needs a source with two ports")
    rho = L.steady_state()
    deltas = (dq1, dq2)
    cmm = np.zeros((2, 2), dtype=complex)
    cmp = np.zeros((2, 2), dtype=complex)
    for j, pj in enumerate(L.ports):
        for i, pi in enumerate(L.ports):
            pref = np.sqrt(pi.rate * pj.rate)
            if pref == 0:
                continue
            # port frequencies convert drive-frame probes into model-frame ones
            if pi.frequency == 0.0:
                vm, vp = laplace_correlation(L, [pi.op, pi.op.dag()], pj.op, deltas[j])
            else:
                vm = laplace_correlation(L, pi.op, pj.op, deltas[j] + pi.frequency)
                vp = laplace_correlation(L, pi.op.dag(), pj.op, deltas[j] - pi.frequency)
            cmm[i, j] = pref * vm
            cmp[i, j] = pref * vp
    eps = np.array([np.sqrt(p.rate) * p.op.expect(rho) for p in L.ports])
    return CorrelationSet((float(dq1), float(dq2)), cmm, cmp, eps)
