"""Distributable entanglement of driven two-level photon sources.

Submodules
----------
operators  Hilbert spaces, operators and density matrices.
liouville  Superoperators, steady states and correlation spectra.
models     Bare and cavity-filtered driven emitters.
gaussian   Quadratic cavity models and Gaussian moments.
entangle   Reservoir mapping, concurrence and target-qubit master equations.
network    Finite-linewidth cascaded network with the target qubits included.
sweep      Sweeps, optimizers and result emission; ``recipes`` and ``cli`` on top.
"""

__version__ = "0.1.0"

from .entangle import (EffectiveTMS, TMSParams, cd_from_spectra, concurrence_distributable,
                       effective_tms, qubit_me_general, qubit_me_resonant, tms_from_spectra,
                       wootters_concurrence)
from .gaussian import (QuadraticModel, drift_from_model, gaussian_correlation_set,
                       gaussian_laplace_spectrum, log_negativity, steady_second_moments)
from .liouville import (CorrelationSet, Liouvillian, Port, correlation_set, dissipator,
                        generalized_dissipator, hamiltonian_term, laplace_correlation,
                        steady_state)
from .models import (CavityParams, TlsParams, bare_tls, bogoliubov_weak_coupling,
                     dressed_rwa, dressed_transform, qms_closed_form, qms_quadratic,
                     resolved_purcell, tls_two_cavities)
from .network import NetworkParams, analyze_network, build_network, optimize_network
from .operators import (DensityMatrix, HilbertSpace, Operator, destroy, embed, partial_trace,
                        pauli)
