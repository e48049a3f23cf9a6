import numpy as np
import pytest
from hypothesis import given, strategies as st

from cascade_lab.entangle import cd_from_spectra
from cascade_lab.liouville import correlation_set
from cascade_lab.models import TlsParams, bare_tls
from cascade_lab.network import (NetworkParams, analyze_network, build_network,
                                 optimize_network)
from cascade_lab.operators import partial_trace


@given(st.floats(0.1, 4.0), st.floats(-2.0, 2.0), st.floats(0.01, 10.0), st.floats(0.0, 2.0))
def test_source_is_unaffected_by_targets(omega0, delta0, gamma, dq):
    src = TlsParams(delta0=delta0, omega0=omega0)
    rho = build_network(NetworkParams(src, gamma, dq)).steady_state()
    ref = bare_tls(src).steady_state()
    assert np.allclose(partial_trace(rho, [0]).full(), ref.full(), atol=1e-9)


def test_identical_qubits_are_symmetric():
    rep = analyze_network(NetworkParams(TlsParams(omega0=1.5), 2.0, 0.0))
    assert rep.C01 == pytest.approx(rep.C02, abs=1e-10)


def test_markov_limit_matches_reservoir_picture():
    src = TlsParams(omega0=1.9)
    dq = 0.6
    cd, _, _ = cd_from_spectra(correlation_set(bare_tls(src), dq, -dq))
    rep = analyze_network(NetworkParams(src, 1e-3, dq))
    assert rep.C12 == pytest.approx(cd, abs=0.01)


def test_report_fields():
    rep = analyze_network(NetworkParams(TlsParams(omega0=1.9), 4.9, 0.6))
    assert set(rep.concurrences) == {"01", "02", "12"}
    assert set(rep.coherences) == {"gg_ee_12", "eg_ge_12", "eg_ge_01", "gg_ee_01"}
    assert all(0 <= c <= 1 for c in rep.concurrences.values())
    assert abs(rep.state.tr() - 1) < 1e-10


def test_optimizer_smoke():
    opt = optimize_network(4.9, grid_points=5, max_solves=60)
    assert opt.n_solves <= 60
    assert 0.1 <= opt.omega0 <= 6.0 and 0.0 <= opt.delta_q <= 3.0
    assert opt.C12 >= opt.grid_best[2] - 1e-12


def test_negative_gamma_rejected():
    with pytest.raises(ValueError):
        NetworkParams(TlsParams(), -1.0)


def test_decoupled_qubits_are_degenerate():
    from cascade_lab.liouville import DegenerateSteadyStateError
    with pytest.raises(DegenerateSteadyStateError):
        analyze_network(NetworkParams(TlsParams(omega0=1.0), 0.0))
