"""hybridom: mean-field numerics for a two-cavity hybrid optomechanical system.

An optomechanical cavity (movable end mirror, radiation-pressure coupling)
receives optical feedback from a second cavity holding a ground-state atomic
ensemble. The package computes the steady-state intensity branches (optical
bistability), classifies their linear stability (Routh-Hurwitz plus
eigenvalues of the drift matrix), evaluates radiation-pressure cooling of
the mirror, integrates the mean-field dynamics, and orchestrates parameter
sweeps with CSV output.
"""

from .atomic_feedback import (
    CavityCState,
    FeedbackTerm,
    atomic_susceptibility,
    cavity_c_steady_state,
    feedback_for,
    feedback_term,
)
from .cooling import (
    CoolingReport,
    cooling_report,
    damping_and_spring,
    phonon_number,
    response_factor,
    sideband_rates,
)
from .dynamics import (
    MeanFieldState,
    SettleResult,
    integrate,
    max_stable_dt,
    mechanical_energy,
    photon_number,
    rhs,
    settle,
    write_trajectory_csv,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    DivergenceError,
    InternalConsistencyError,
    NumericalError,
    PoleProximityError,
)
from .params import (
    C_LIGHT,
    HBAR,
    K_B,
    DerivedParams,
    SystemConfig,
    config_from_dict,
    derive,
    drive_amplitude,
    load_config,
    n_bath,
)
from .presets import load_preset, preset_names, resolve_config
from .stability import (
    DriftMatrix,
    StabilityVerdict,
    build_drift,
    characteristic_coefficients,
    classify,
    eigenvalue_stability,
    expanded_characteristic,
    routh_hurwitz,
)
from .steady_state import (
    SteadyStateBranch,
    cubic_coefficients,
    cubic_real_roots,
    mean_field,
    solve_branches,
)
from .sweeps import (
    DEFAULT_POINTS,
    CoolingRow,
    HysteresisResult,
    SweepRow,
    cooling_scan,
    detuning_scan,
    hysteresis_scan,
    write_csv,
)

__version__ = "0.1.0"
