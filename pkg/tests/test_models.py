import numpy as np
import pytest
from hypothesis import given, strategies as st

from cascade_lab.entangle import cd_from_spectra
from cascade_lab.gaussian import gaussian_correlation_set, steady_second_moments
from cascade_lab.liouville import correlation_set
from cascade_lab.models import (BranchError, CavityParams, MemoryGuardError, TlsParams,
                                bare_tls, bogoliubov_coefficients, bogoliubov_quadratic,
                                bogoliubov_weak_coupling, dressed_rates, dressed_rwa,
                                dressed_transform, purcell_rates, qms_closed_form,
                                qms_quadratic, resolved_purcell, tls_two_cavities)
from cascade_lab.operators import pauli

angles = st.floats(0.05, np.pi / 2 - 0.05)


@given(st.floats(0.5, 50.0), angles)
def test_dressed_transform_diagonalizes_drive(wt, th):
    p = TlsParams.from_dressed(wt, th)
    U, _ = dressed_transform(p)
    H = 0.5 * p.delta0 * pauli("z") + 0.5 * p.omega0 * pauli("x")
    D = U.dag() @ H @ U
    assert np.allclose(D.full(), 0.5 * wt * pauli("z").full(), atol=1e-10)
    assert p.theta == pytest.approx(th)
    assert p.omega_tilde == pytest.approx(wt)


def test_dressed_rates_sum_rule():
    p = TlsParams.from_dressed(10.0, 0.7, gamma0=2.0)
    r = dressed_rates(p)
    # sigma- = sin(th)/2 tau_z + cos^2(th/2) tau- - sin^2(th/2) tau+
    assert np.sqrt(r.gamma_plus) + np.sqrt(r.gamma_minus) == pytest.approx(np.sqrt(2.0))
    assert 4 * r.gamma_z == pytest.approx(2.0 * np.sin(0.7) ** 2)
    assert r.gamma_perp == pytest.approx(2 * r.gamma_z + 0.5 * (r.gamma_plus + r.gamma_minus))


def strong_drive_analytics(th):
    N = 4 * np.sin(th) ** 4 / (4 * np.cos(2 * th) + 29 - np.cos(4 * th))
    M = abs(np.sin(th) ** 2 / (np.cos(2 * th) - 5))
    return N, M


@pytest.mark.parametrize("th", [np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2])
def test_bare_tls_strong_drive_limit(th):
    wt = 1e3
    L = bare_tls(TlsParams.from_dressed(wt, th))
    cd, tms, eff = cd_from_spectra(correlation_set(L, wt, -wt))
    N, M = strong_drive_analytics(th)
    assert tms.N1 == pytest.approx(N, rel=1e-2)
    assert abs(tms.M) == pytest.approx(M, rel=1e-2)


def test_bare_tls_resonant_drive_effective_state():
    wt = 1e3
    L = bare_tls(TlsParams.from_dressed(wt, np.pi / 2))
    cd, tms, eff = cd_from_spectra(correlation_set(L, wt, -wt))
    assert eff.r_eff == pytest.approx(0.5 * np.arctanh(0.25), abs=1e-3)
    assert eff.mu_eff == pytest.approx(0.600, abs=1e-3)
    assert cd < 1e-6


def purcell_cd(wt, th, g=0.1, gamma0=0.0):
    p = CavityParams(TlsParams.from_dressed(wt, th, gamma0=gamma0), g=g, delta_c=wt)
    return cd_from_spectra(correlation_set(resolved_purcell(p), wt, -wt))


@pytest.mark.parametrize("th", [0.4, np.pi / 4, 1.1])
def test_purcell_large_splitting_limit(th):
    _, tms, _ = purcell_cd(1e4, th)
    N = 4 * np.sin(th) ** 4 / (3 + np.cos(2 * th)) ** 2
    assert tms.N1 == pytest.approx(N, rel=1e-2)
    assert abs(tms.M) == pytest.approx(np.sqrt(N), rel=1e-2)


def test_purcell_resonant_limit():
    _, _, eff = purcell_cd(1e4, np.pi / 2 - 1e-6)
    assert eff.r_eff == pytest.approx(0.402, abs=1e-3)
    assert eff.mu_eff == pytest.approx(0.200, abs=1e-3)


def test_purcell_rates_match_filter_response():
    p = CavityParams(TlsParams.from_dressed(30.0, np.pi / 4), g=0.1, delta_c=30.0)
    r = purcell_rates(p)
    assert r.kappa1 == pytest.approx(4 * p.g_c ** 2)
    assert r.kappa2 == pytest.approx(4 * p.g_s ** 2)


def test_purcell_value_at_quarter_angle():
    cd, _, _ = purcell_cd(30.0, np.pi / 4)
    assert cd == pytest.approx(0.496257, abs=2e-6)


def test_full_cavity_reduces_to_purcell():
    wt, th = 30.0, np.pi / 4
    p = CavityParams(TlsParams.from_dressed(wt, th), g=0.1, delta_c=wt, n_fock=3)
    cd_full, _, _ = cd_from_spectra(correlation_set(tls_two_cavities(p), wt, -wt))
    cd_p, _, _ = purcell_cd(wt, th)
    assert cd_full == pytest.approx(cd_p, abs=0.02)


def test_dressed_rwa_frames_agree():
    wt, th = 20.0, np.pi / 3
    p = CavityParams(TlsParams.from_dressed(wt, th, gamma0=1.0, kappa=0.05), g=0.1,
                     delta_c=wt, n_fock=4)
    a = cd_from_spectra(correlation_set(dressed_rwa(p, "drive"), wt, -wt))[0]
    b = cd_from_spectra(correlation_set(dressed_rwa(p, "cavity"), wt, -wt))[0]
    assert a == pytest.approx(b, abs=1e-8)


def test_bogoliubov_basis_matches_cavity_basis_at_low_occupation():
    wt, th = 20.0, np.pi / 3
    p = CavityParams(TlsParams.from_dressed(wt, th, gamma0=1.0, kappa=0.05), g=0.05,
                     delta_c=wt, n_fock=6)
    a = cd_from_spectra(correlation_set(dressed_rwa(p, "cavity"), wt, -wt))[0]
    b = cd_from_spectra(correlation_set(dressed_rwa(p, "cavity", "bogoliubov"), wt, -wt))[0]
    assert a == pytest.approx(b, abs=5e-3)


def test_bogoliubov_coefficients_are_hyperbolic():
    p = CavityParams(TlsParams.from_dressed(10.0, 1.0), g=1.0)
    C, S = bogoliubov_coefficients(p)
    assert C ** 2 - S ** 2 == pytest.approx(1.0)
    assert p.g_B == pytest.approx(np.sqrt(np.cos(1.0)))
    with pytest.raises(BranchError):
        bogoliubov_coefficients(CavityParams(TlsParams.from_dressed(10.0, np.pi / 2), g=1.0))
    with pytest.raises(BranchError):
        _ = CavityParams(TlsParams.from_dressed(10.0, 2.0), g=1.0).g_B


def test_memory_guard():
    p = CavityParams(TlsParams.from_dressed(10.0, 1.0), g=0.1, n_fock=40)
    with pytest.raises(MemoryGuardError):
        tls_two_cavities(p)


def qms_params(wt=500.0, th=np.pi / 3, kappa=1e-3, g=0.1, gamma0=1.0, delta_c=None):
    return CavityParams(TlsParams.from_dressed(wt, th, gamma0=gamma0, kappa=kappa), g=g,
                        delta_c=wt if delta_c is None else delta_c)


@pytest.mark.parametrize("secular", [True, False])
def test_qms_hermiticity_of_frequency_table(secular):
    m = qms_quadratic(qms_params(wt=30.0, th=1.0), secular=secular)
    assert m.hermiticity_defect() < 1e-12
    h, _, _ = m.generator()
    # the quadratic form c^T h c is Hermitian after symmetrization
    hs = 0.5 * (h + h.T)
    X = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.allclose(X @ hs.conj() @ X, hs, atol=1e-12)


def test_qms_dissipative_tables():
    full = qms_quadratic(qms_params(), secular=False)
    for tab in (full.gamma_p, full.gamma_m):
        assert np.abs(tab - tab.conj().T).max() < 1e-12
    # only the secular tables are guaranteed positive
    sec = qms_quadratic(qms_params())
    for tab in (sec.gamma_p, sec.gamma_m):
        assert np.linalg.eigvalsh(tab).min() > -1e-12


@pytest.mark.parametrize("ratio", [0.03, 0.1, 0.3])
def test_qms_closed_form(ratio):
    base = qms_params(kappa=1.0)
    b = bogoliubov_weak_coupling(base)
    p = qms_params(kappa=ratio * b.gamma_theta)
    m = qms_quadratic(p)
    cs = gaussian_correlation_set(m, 500.0, -500.0)
    _, tms, _ = cd_from_spectra(cs)
    cf = qms_closed_form(b.r_theta, p.kappa, b.gamma_theta)
    assert tms.N1 == pytest.approx(cf.N, rel=0.03)
    assert abs(tms.M) == pytest.approx(cf.M, rel=0.03)


def test_weak_coupling_rates_at_third_angle():
    b = bogoliubov_weak_coupling(qms_params(wt=100.0))
    assert b.tau_z == pytest.approx(-0.8)
    assert b.gamma_theta == pytest.approx(1.1636 * 0.01, rel=1e-3)
    assert b.r_theta == pytest.approx(np.arctanh(1 / 3))


def test_weak_coupling_squeezing_sign_tracks_qms_phase():
    """Detuning the cavities rotates M the same way in both quadratic models."""
    out = []
    for model in (qms_quadratic, bogoliubov_quadratic):
        ph = []
        for dz in (-0.5, 0.5):
            p = qms_params(wt=100.0, delta_c=100.0 - dz, kappa=2e-3)
            ph.append(steady_second_moments(model(p)).aa(1, 2))
        out.append(np.angle(ph[1] / ph[0]))
    assert np.sign(out[0]) == np.sign(out[1])
    assert out[0] == pytest.approx(out[1], rel=0.1)


def test_resonant_drive_has_no_squeezing():
    b = bogoliubov_weak_coupling(qms_params(th=np.pi / 2))
    assert b.diverging and b.g_tms == 0.0 and b.gamma_theta == 0.0


def test_weak_drive_resonant_not_null():
    # unresolved sidebands: the resonant null is a strong-driving property only
    def cd(wt, g0):
        L = bare_tls(TlsParams.from_dressed(wt, np.pi / 2, gamma0=g0))
        return cd_from_spectra(correlation_set(L, wt, -wt))[0]

    assert cd(2.0, 2.0) == pytest.approx(0.0188645, abs=1e-6)
    assert cd(1.0, 1.0) > 0.05
    assert cd(30.0, 2.0) < 1e-9


def test_cavity_params_validation():
    with pytest.raises(ValueError):
        CavityParams(TlsParams(), g=-1.0)
    with pytest.raises(ValueError):
        TlsParams(gamma0=-1.0)
