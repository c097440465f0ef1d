"""qcgibbs: quantum vs classical canonical ensembles on concrete model families.

Partition sums, mean energies, and Boltzmann-Gibbs-Shannon entropies for
particle-in-a-box and radial power-law potentials (plus tabulated 1-D
profiles), with systematic grid verification of the semiclassical domination
inequality, the high-temperature and small-h limits, entropy monotonicity,
and the fixed-temperature energy-entropy game over unnormalized weights.
"""

from .errors import (
    AccuracyError,
    ContractError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    QCGibbsError,
    ResourceError,
    TailModelError,
    TruncationError,
)
from .potential import (
    Potential,
    PotentialKind,
    ScalingExponents,
    box,
    check_homogeneity,
    evaluate,
    homogeneous,
    load_tabulated_csv,
    save_tabulated_csv,
    scaling_exponents,
    tabulated,
    volume,
)
from .spectrum import (
    Spectrum,
    SpectrumSource,
    fd_eigenvalues,
    oscillator_spectrum,
    rescale,
    solve_box,
    solve_fd_1d,
    spectrum_from_csv,
    spectrum_to_csv,
    tail_bound,
    wedge_spectrum,
)
from .ensemble import (
    ThermoPoint,
    entropy_classical,
    entropy_quantum,
    log_z_quantum,
    mean_energy_classical,
    mean_energy_quantum,
    psi,
    thermo_point,
    thermo_table_to_csv,
    thermo_table_to_json,
    z_classical,
    z_quantum,
)
from .game import (
    AscentResult,
    GameState,
    StepPolicy,
    ascend,
    compromise,
    gradient,
    hessian,
    principal_minor_signs,
    stationary_point,
    stationary_state,
    structured_det,
)
from .models import (
    ModelFamily,
    box_family,
    homogeneous_family,
    tabulated_family,
)
from .verify import (
    ClaimId,
    Status,
    VerificationReport,
    check_c11,
    check_c12,
    check_c13,
    check_c41_and_props,
    check_t31,
    check_t41,
    check_wehrl,
    reports_to_json,
    run_claims,
)

__version__ = "0.1.0"
