import numpy as np
import pytest
from hypothesis import given, strategies as st

from cascade_lab.gaussian import (InstabilityError, QuadraticModel, UnphysicalCovarianceError,
                                  drift_from_model, gaussian_correlation_set,
                                  gaussian_laplace_spectrum, log_negativity, lyapunov_residual,
                                  moments_from_state, steady_second_moments, tms_moments)
from cascade_lab.liouville import Liouvillian, generalized_dissipator, laplace_correlation
from cascade_lab.models import CavityParams, TlsParams, qms_quadratic
from cascade_lab.operators import destroy, embed

N_FOCK = 7


def sample_model(rng, drive=True):
    """Stable, weakly excited quadratic model with every table populated."""
    d = rng.uniform(-0.3, 0.3, (2, 2)) + 1j * rng.uniform(-0.3, 0.3, (2, 2))
    n = rng.uniform(0.0, 0.05, 2)
    m = 0.03 * (rng.normal() + 1j * rng.normal())
    return QuadraticModel(
        delta_c=rng.uniform(0.5, 2.0), kappa=1.0,
        Gamma=np.array([[0, -0.2 * m], [-0.1 * m, 0]]),
        g=0.02 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))),
        gamma_p=np.diag(0.2 * n), gamma_m=np.diag(0.2 * (n + 1)),
        delta=0.5 * (d + d.conj().T),
        drive=0.03 * (rng.normal(size=2) + 1j * rng.normal(size=2)) if drive else np.zeros(2))


def fock_liouvillian(m: QuadraticModel) -> tuple[Liouvillian, list]:
    """The same generator written directly in a truncated Fock space."""
    space = (N_FOCK, N_FOCK)
    a = [embed(destroy(N_FOCK), space, k) for k in (0, 1)]
    ad = [x.dag() for x in a]
    H = m.delta_c * (ad[0] @ a[0] - ad[1] @ a[1])
    for i in range(2):
        H = H + m.drive[i] * ad[i] + np.conj(m.drive[i]) * a[i]
        for j in range(2):
            H = H + m.delta[i, j] * (ad[i] @ a[j])
            H = H + m.g[i, j] * (a[i] @ a[j]) + np.conj(m.g[i, j]) * (ad[i] @ ad[j])
    H = 0.5 * (H + H.dag())
    extra = []
    for i in range(2):
        for j in range(2):
            extra += [generalized_dissipator(a[i], a[j], m.Gamma[i, j]),
                      generalized_dissipator(ad[j], ad[i], np.conj(m.Gamma[i, j])),
                      generalized_dissipator(ad[i], a[j], m.gamma_p[i, j]),
                      generalized_dissipator(a[i], ad[j], m.gamma_m[i, j])]
    L = Liouvillian.build(H, [(a[0], m.kappa), (a[1], m.kappa)], extra=extra)
    return L, a


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_moments_match_fock_space(seed):
    m = sample_model(np.random.default_rng(seed))
    s = steady_second_moments(m)
    L, a = fock_liouvillian(m)
    ref = moments_from_state(L.steady_state(), *a)
    assert np.allclose(s.mean, ref.mean, atol=1e-7)
    assert np.allclose(s.sigma, ref.sigma, atol=1e-7)


@pytest.mark.parametrize("seed", [3, 4])
def test_spectra_match_fock_space(seed):
    m = sample_model(np.random.default_rng(seed))
    L, a = fock_liouvillian(m)
    for delta in (-1.3, 0.0, 0.7):
        for A, opA in (((1, "-"), a[0]), ((2, "+"), a[1].dag())):
            for B, opB in (((2, "-"), a[1]), ((1, "-"), a[0])):
                got = gaussian_laplace_spectrum(m, A, B, delta)
                ref = laplace_correlation(L, opA, opB, delta)
                assert got == pytest.approx(ref, abs=1e-7)


@given(st.integers(0, 10_000))
def test_lyapunov_residual(seed):
    m = sample_model(np.random.default_rng(seed))
    ds = drift_from_model(m)
    assert lyapunov_residual(ds, steady_second_moments(ds)) < 1e-10


@given(st.floats(0.0, 2.0), st.floats(-np.pi, np.pi))
def test_tms_vacuum_negativity(r, phase):
    s = tms_moments(r, phase)
    assert log_negativity(s) == pytest.approx(2 * r / np.log(2), abs=1e-9)
    assert s.uncertainty_min() > -1e-9


def test_thermal_state_has_no_negativity():
    sig = np.zeros((4, 4), complex)
    sig[0, 1] = sig[2, 3] = 1.3
    sig[1, 0] = sig[3, 2] = 0.3
    from cascade_lab.gaussian import SecondMoments
    assert log_negativity(SecondMoments(np.zeros(4), sig)) == 0.0


def test_unphysical_covariance_rejected():
    with pytest.raises(UnphysicalCovarianceError):
        log_negativity(0.1 * np.eye(4))
    with pytest.raises(UnphysicalCovarianceError):
        log_negativity(np.eye(3))


def test_unstable_model_raises():
    m = QuadraticModel(delta_c=0.0, kappa=0.1, g=np.array([[0, 1.0], [1.0, 0]]))
    with pytest.raises(InstabilityError):
        steady_second_moments(m)


def test_correlation_set_uses_port_rate():
    m = sample_model(np.random.default_rng(7), drive=False)
    c = gaussian_correlation_set(m, 0.4, -0.4)
    assert c.cmm[0, 1] == pytest.approx(m.kappa * gaussian_laplace_spectrum(
        m, (1, "-"), (2, "-"), -0.4))
    assert np.allclose(c.eps, 0)


def test_qms_model_is_physical_and_stable():
    p = CavityParams(TlsParams.from_dressed(100.0, np.pi / 3, gamma0=1.0, kappa=1e-3),
                     g=0.1, delta_c=100.0)
    s = steady_second_moments(qms_quadratic(p))
    s.validate()
    assert log_negativity(s) > 0
