"""accellab: a desk-scale verification lab for accelerated first-order methods.

Convex objective oracles with known minimizer structure, the accelerated
gradient and optimized gradient methods in both published forms, an adaptive
integrator for the vanishing-damping oscillator ODE with energy observers
and event detection, and a diagnostics layer that turns the underlying
monotonicity, identity, rate and divergence arguments into machine checks.
"""

from .diagnostics import (
    DiagnosticReport,
    PairGapSeries,
    collect_nag_pair_gaps,
    collect_ogm_pair_gaps,
    monotone_check,
    nag_recursion_residual,
    ode_pairgap_check,
    ogm_recursion_residual,
    tail_diameter,
    toeplitz_check,
)
from .errors import IntegrationError, NumericalError
from .methods import (
    MethodState,
    RunRecord,
    energy_nag,
    energy_ogm,
    gd_step,
    initial_state,
    nag_step_standard,
    nag_step_threeseq,
    ogm_identity_audit,
    ogm_step_standard,
    ogm_step_threeseq,
    run_method,
)
from .ode import (
    EnergyRecord,
    Event,
    ODETrajectory,
    OdeConfig,
    energy_F,
    energy_general,
    energy_r3,
    integrate,
    oscillator_energy,
    run_counterexample,
    sturm_excursion_check,
)
from .problems import (
    ObjectiveOracle,
    ProblemCatalogEntry,
    built_in_catalog,
    catalog_to_json,
    check_cocoercivity,
    check_convexity_inequality,
    check_gradient_fd,
    default_start,
    get_catalog_entry,
    make_counterexample_1d,
    make_quadratic,
    make_segment_argmin_2d,
    random_quadratic,
)
from .sequences import StepSequence, seq_next
from .verify import verify_suite

__version__ = "0.1.0"
