import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from cascade_lab.entangle import (AsymmetricProbeError, TMSParams, UnphysicalSpectraError,
                                  cd_from_spectra, concurrence_distributable, effective_tms,
                                  qubit_me_general, qubit_me_resonant, tms_from_spectra,
                                  wootters_concurrence)
from cascade_lab.liouville import CorrelationSet, correlation_set
from cascade_lab.models import TlsParams, bare_tls
from cascade_lab.operators import DensityMatrix, ket2dm


def werner(p):
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    return p * np.outer(psi, psi) + (1 - p) * np.eye(4) / 4


def test_wootters_oracles():
    assert wootters_concurrence(ket2dm(np.array([1, 0, 0, 1]), (2, 2))) == pytest.approx(1.0)
    assert wootters_concurrence(ket2dm(np.array([1, 1, 1, 1]), (2, 2))) == pytest.approx(0.0)
    for p in (0.2, 0.5, 0.8, 1.0):
        assert wootters_concurrence(werner(p)) == pytest.approx(max(0, (3 * p - 1) / 2))


@given(st.floats(0, np.pi), st.floats(-np.pi, np.pi))
def test_wootters_pure_state(a, phi):
    psi = np.array([np.cos(a / 2), 0, 0, np.exp(1j * phi) * np.sin(a / 2)])
    assert wootters_concurrence(ket2dm(psi, (2, 2))) == pytest.approx(abs(np.sin(a)), abs=1e-9)


@given(st.floats(0.0, 2.0), st.floats(-np.pi, np.pi))
def test_pure_tms_reservoir(r, phase):
    p = TMSParams(np.sinh(r) ** 2, np.sinh(r) ** 2, np.exp(1j * phase) * np.sinh(r) * np.cosh(r))
    assume(2 * abs(p.M) < p.N1 + p.N2 + 1 - 1e-9)
    e = effective_tms(p)
    assert e.r_eff == pytest.approx(r, abs=1e-7)
    assert e.mu_eff == pytest.approx(1.0, abs=1e-7)
    assert concurrence_distributable(e) == pytest.approx(np.tanh(2 * r), abs=1e-7)


symmetric = st.tuples(st.floats(0.0, 3.0), st.floats(0.0, 0.999), st.floats(-np.pi, np.pi))


@given(symmetric)
def test_symmetric_reservoir_equivalence(args):
    """Concurrence of the driven qubit pair equals the closed form for N1 = N2."""
    N, frac, phase = args
    M = frac * np.sqrt(N * (N + 1)) * np.exp(1j * phase)
    p = TMSParams(N, N, M)
    cd = concurrence_distributable(effective_tms(p))
    rho = qubit_me_resonant(p, 1.0).steady_state()
    assert wootters_concurrence(rho) == pytest.approx(cd, abs=1e-8)


def test_cd_is_phase_invariant():
    base = TMSParams(0.4, 0.6, 0.5)
    ref = concurrence_distributable(effective_tms(base))
    for ph in np.linspace(-3, 3, 7):
        p = TMSParams(0.4, 0.6, 0.5 * np.exp(1j * ph))
        assert concurrence_distributable(effective_tms(p)) == pytest.approx(ref)


def test_unphysical_spectra_raise():
    with pytest.raises(UnphysicalSpectraError):
        effective_tms(TMSParams(0.1, 0.1, 1.0))
    assert not TMSParams(0.1, 0.1, 1.0).is_physical()


def test_mirrored_probes_required():
    with pytest.raises(AsymmetricProbeError):
        tms_from_spectra(CorrelationSet.zeros(1.0, 0.5))


def test_mixedness_kills_entanglement():
    # mu_eff = 1/3 is the threshold for C_d > 0
    for N in (0.5, 1.0, 2.0):
        p = TMSParams(N, N, 0.0)
        assert concurrence_distributable(effective_tms(p)) == 0.0


def test_general_me_reduces_to_resonant_form():
    """With slow qubits the drive-frame equation reproduces the reservoir picture."""
    wt, th = 1e3, np.pi / 3
    L = bare_tls(TlsParams.from_dressed(wt, th))
    c = correlation_set(L, wt, -wt)
    cd, tms, _ = cd_from_spectra(c)
    gam = 1e-4
    rho = qubit_me_general(c, gam, gam, resonant_only=True).steady_state()
    ref = qubit_me_resonant(tms, gam).steady_state()
    assert wootters_concurrence(rho) == pytest.approx(wootters_concurrence(ref), abs=1e-6)
    assert wootters_concurrence(rho) == pytest.approx(cd, abs=1e-4)


def test_wootters_rejects_wrong_shape():
    with pytest.raises(Exception):
        wootters_concurrence(DensityMatrix(np.eye(3) / 3))
