"""Jump-adapted Euler simulation of jump diffusions with Markovian
regime switching, with exact-solution oracles, a regime-modulated
surplus model, and closed-form expected ruin times."""

from .analytic import (
    RuinAnalytics,
    RuinModelInputs,
    eta_rho,
    expected_ruin_time,
    expected_ruin_time_reference,
    make_analytics,
)
from .ctmc import (
    GeneratorMatrix,
    TransitionMatrix,
    sample_next_regime,
    sample_regime_path,
    stationary_distribution,
    transition_matrix,
    validate_generator,
)
from .drivers import (
    DegenerateMarks,
    DriverRealization,
    EmpiricalMarks,
    ExponentialMarks,
    JumpSpec,
    Stream,
    make_stream,
    realize_drivers,
    sample_brownian_increments,
    sample_jump_times,
    sample_marks,
)
from .grid import TimeGrid, build_grid
from .mc import (
    ErrorTable,
    RuinTable,
    StudyConfig,
    aggregate,
    convergence_study,
    event_driven_ruin_oracle,
    fit_loglog,
    ruin_study,
    strong_error_trial,
)
from .models import (
    GeometricLevyParams,
    SurplusParams,
    detect_ruin,
    gl_coefficients,
    gl_exact_path,
    realize_gl_drivers,
    realize_surplus_drivers,
    surplus_coefficients,
)
from .scheme import CoefficientSet, SimulatedPath, euler_step, simulate_path

__version__ = "0.1.0"
