"""Phase estimation with a three-level atom driven by two classical fields.

Exact spectrum and evolution, the two-phase QFI matrix with Cramer-Rao
strategy comparison, l2 coherence and the Hilbert-Schmidt speed, each closed
form paired with a definition-based numerical counterpart.
"""
from ._backend import BACKEND
from .errors import (
    DegenerateModelError,
    Flag,
    FormulaDiscrepancyError,
    InvalidArgumentError,
    SingularInformationError,
)
from .estimation import (
    QfiMatrix,
    StrategyReport,
    compatibility,
    individual_bounds,
    kappa,
    qfi_cross_analytic,
    qfi_matrix,
    qfi_phi2_analytic,
    qfi_phi3_analytic,
    qfi_pure_generic,
    simultaneous_bounds,
    strategy_report,
    xi,
)
from .oracle import (
    EigenSystem,
    ValidationReport,
    cross_validate,
    eigensolve_hermitian,
    fd_density_derivative,
    fd_state_derivative,
    matrix_exponential_unitary,
)
from .quantifiers import (
    classical_distance_alpha,
    classical_speed_alpha,
    coherence_l2,
    coherence_l2_analytic,
    hss,
    hss_phi2_analytic,
    hss_phi3_analytic,
    quantum_speed_alpha,
)
from .qsystem import (
    DensityMatrix,
    DressedSpectrum,
    DriveParams,
    PureState,
    approx_eigenfrequencies,
    build_hamiltonian,
    density_matrix,
    dressed_states,
    eigenfrequencies,
    evolve,
    evolve_exact,
    evolve_large_detuning,
    frame_shifts,
    initial_amplitudes,
    rabi_from_field,
)

__version__ = "0.1.0"
