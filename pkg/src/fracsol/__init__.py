"""Numerical laboratory for ground states of fractional KdV/BBM-type equations."""

from .spectral import (
    DispersionSymbol,
    Grid1D,
    RealField,
    apply_multiplier,
    d_alpha,
    energy_norm,
    field_from_function,
    field_from_values,
    integrate,
    inner,
    l2_norm,
    make_grid,
    resolvent,
    shift_field,
)
from .functionals import (
    FunctionalValue,
    GNReport,
    bbm_hamiltonian,
    bbm_quadratic,
    energy_fkdv,
    gn_check,
    mass,
    weinstein,
)
from .ground_state import (
    MinimizerResult,
    ModelSpec,
    SolitaryWave,
    cstar,
    dilate_field,
    minimize_iq,
    petviashvili,
    rescale_solitary,
    sample_interpolant,
    solitary_from_profile,
)
from .verification import (
    CommutatorDecay,
    GNScanReport,
    IdentityReport,
    commutator_decay,
    gn_scan,
    identity_suite,
    iq_scaling_check,
    make_scan_battery,
    pohojaev_functional_check,
    saturating_field,
    smooth_bump,
)
from .evolution import (
    EvolutionTrace,
    StabilityReport,
    evolve,
    make_perturbation,
    orbital_distance,
    stability_experiment,
)
from .kp import (
    BLTReport,
    Grid2D,
    KPConsistencyReport,
    KPIntegrals,
    RealField2D,
    blt_ratio,
    dx_inv_dy,
    field2d_from_function,
    field2d_from_values,
    integrate2d,
    kp_energy,
    kp_identity_consistency,
    kp_rescale,
    make_grid2d,
    project_zero_x_mean,
)
from .errors import BlowUpError, ConvergenceError, NoSolitaryWaveError, NumericalError

__version__ = "0.1.0"
