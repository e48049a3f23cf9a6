import warnings

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st
from scipy.integrate import simpson

from cascade_lab.liouville import (DegenerateSteadyStateError, Liouvillian, cascaded_coupling,
                                   correlation_set, dissipator, generalized_dissipator,
                                   hamiltonian_term, laplace_correlation, sprepost, unvec, vec)
from cascade_lab.models import TlsParams, bare_tls
from cascade_lab.operators import HilbertSpace, Operator, embed, identity, pauli

rates = st.floats(0.05, 5.0)
detunings = st.floats(-5.0, 5.0)


def random_matrix(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def test_vectorization_convention():
    rng = np.random.default_rng(0)
    A, X, B = (random_matrix(rng, 3) for _ in range(3))
    lhs = sprepost(Operator(A), Operator(B)) @ vec(X)
    assert np.allclose(unvec(lhs, 3), A @ X @ B)


def test_dissipator_action():
    rng = np.random.default_rng(1)
    A = Operator(random_matrix(rng, 3))
    X = random_matrix(rng, 3)
    a = A.full()
    expected = a @ X @ a.conj().T - 0.5 * (a.conj().T @ a @ X + X @ a.conj().T @ a)
    assert np.allclose(unvec(dissipator(A) @ vec(X), 3), expected)
    with pytest.raises(ValueError):
        dissipator(A, -1.0)


@given(st.integers(0, 10_000))
def test_generator_preserves_trace_and_hermiticity(seed):
    rng = np.random.default_rng(seed)
    d = 3
    H = Operator(random_matrix(rng, d))
    H = 0.5 * (H + H.dag())
    L = Liouvillian.build(H, [(Operator(random_matrix(rng, d)), rng.uniform(0.1, 2))
                              for _ in range(2)])
    X = random_matrix(rng, d)
    X = X + X.conj().T
    out = L.apply(X)
    assert abs(np.trace(out)) < 1e-10
    assert np.abs(out - out.conj().T).max() < 1e-10


@given(st.integers(0, 10_000))
def test_generalized_dissipator_pair_is_trace_free(seed):
    rng = np.random.default_rng(seed)
    A, B = Operator(random_matrix(rng, 2)), Operator(random_matrix(rng, 2))
    w = complex(rng.normal(), rng.normal())
    L = generalized_dissipator(A, B, w)
    X = random_matrix(rng, 2)
    assert abs(np.trace(unvec(L @ vec(X), 2))) < 1e-10


@given(detunings, st.floats(0.0, 6.0), rates)
def test_bare_tls_matches_bloch_solution(delta, omega, gamma):
    """Excited population of resonance fluorescence from the optical Bloch equations."""
    p = TlsParams(delta0=delta, omega0=omega, gamma0=gamma, kappa=0.0)
    rho = bare_tls(p).steady_state()
    pe = (omega ** 2 / 4) / (delta ** 2 + gamma ** 2 / 4 + omega ** 2 / 2)
    assert rho.full()[1, 1].real == pytest.approx(pe, abs=1e-10)
    # coherence <sigma-> from the same Bloch solution
    sm = -0.5 * omega * (delta + 0.5j * gamma) / (delta ** 2 + gamma ** 2 / 4 + omega ** 2 / 2)
    assert pauli("minus").expect(rho) == pytest.approx(sm, abs=1e-10)


def time_domain_spectrum(L, A, B, delta, t_max=60.0, dt=0.01):
    """Direct propagation of the centered regression vector, then Simpson quadrature."""
    rho = L.steady_state()
    d = L.dim
    bc = B.full() - B.expect(rho) * np.eye(d)
    ac = A.full() - A.expect(rho) * np.eye(d)
    x = vec(bc @ rho.full())
    step = sla.expm(L.dense() * dt)
    ts = np.arange(0.0, t_max + dt / 2, dt)
    vals = np.empty(ts.size, complex)
    for k in range(ts.size):
        vals[k] = np.trace(ac @ unvec(x, d))
        x = step @ x
    return simpson(vals * np.exp(-1j * delta * ts), x=ts)


@pytest.mark.parametrize("delta0,omega0,probe", [(1.0, 2.0, 2.236), (0.0, 3.0, -3.0),
                                                 (2.0, 0.5, 0.0)])
def test_regression_matches_time_domain(delta0, omega0, probe):
    L = bare_tls(TlsParams(delta0=delta0, omega0=omega0, kappa=0.5))
    sm, sp_ = pauli("minus"), pauli("plus")
    for A, B in ((sp_, sm), (sm, sm), (sm, sp_)):
        ref = time_domain_spectrum(L, A, B, probe)
        got = laplace_correlation(L, A, B, probe)
        assert abs(got - ref) < 1e-4 * max(1.0, abs(ref))


def test_resolvent_at_zero_detuning_is_regular():
    L = bare_tls(TlsParams(delta0=0.0, omega0=1.0, kappa=0.5))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        v = laplace_correlation(L, pauli("plus"), pauli("minus"), 0.0)
    assert np.isfinite(v)


def test_incoherent_spectrum_is_real_positive():
    L = bare_tls(TlsParams(delta0=0.5, omega0=3.0, kappa=0.5))
    for probe in np.linspace(-6, 6, 13):
        s = 2 * laplace_correlation(L, pauli("plus"), pauli("minus"), probe).real
        assert s > 0


def test_correlation_set_symmetric_ports():
    L = bare_tls(TlsParams(delta0=1.0, omega0=2.0, kappa=0.5))
    c = correlation_set(L, 2.236, -2.236)
    # both waveguides see the same emitter, so the matrices have equal rows
    assert np.allclose(c.cmm[0], c.cmm[1])
    assert np.allclose(c.cmp[0], c.cmp[1])
    assert np.allclose(c.eps, np.sqrt(0.5) * pauli("minus").expect(L.steady_state()))


def test_degenerate_steady_state_raises():
    H = 0.5 * pauli("z")
    L = Liouvillian.build(H)
    with pytest.raises(DegenerateSteadyStateError):
        L.steady_state()


def test_cascaded_coupling_is_unidirectional():
    """The driven target never acts back on the source."""
    space = HilbertSpace((2, 2))
    tau = embed(pauli("minus"), space, 0)
    q = embed(pauli("minus"), space, 1)
    H = 0.5 * embed(pauli("x"), space, 0) + 0.3 * embed(pauli("z"), space, 0)
    L = Liouvillian.build(H, [(tau, 1.5), (q, 0.7)],
                          extra=[cascaded_coupling(tau, q, 1.0, 0.7)])
    src = bare_tls(TlsParams(delta0=0.6, omega0=1.0, gamma0=0.5, kappa=0.5))
    from cascade_lab.operators import partial_trace
    red = partial_trace(L.steady_state(), [0])
    assert np.allclose(red.full(), src.steady_state().full(), atol=1e-10)


def test_hamiltonian_term_is_commutator():
    rng = np.random.default_rng(5)
    H = Operator(random_matrix(rng, 2))
    H = 0.5 * (H + H.dag())
    X = random_matrix(rng, 2)
    h = H.full()
    assert np.allclose(unvec(hamiltonian_term(H) @ vec(X), 2), -1j * (h @ X - X @ h))
    assert np.allclose(identity(2).full(), np.eye(2))
