"""Setwise coordinate descent for dual decentralized and parallel optimization.

Each agent may only update the coordinates in its own set: the edges at a
node of a communication graph (dual consensus problems) or the parameters a
worker can write on a shared server (separable primal problems). The package
provides the objectives, the selection rules (uniform, Gauss-Southwell,
Lipschitz and Gauss-Southwell-Lipschitz) with exact or estimated stepsizes,
an iteration-driven engine, a timed asynchronous simulator, the norms used
in the rate analysis and a preset-driven experiment runner.
"""

from .analysis import RateFit, fit_rate, geometric_mean_trace, reference_optimum
from .engine import ALGORITHMS, Reference, RunConfig, Trace, one_step_decrease, run_iterations
from .experiments import ExperimentConfig, SummaryReport, run_config, run_experiment, run_preset
from .norms import (
    RateCertificate,
    SetAssignment,
    assignment_report,
    best_assignment_bruteforce,
    certificate_for,
    norm_A,
    norm_L,
    norm_L_dual,
    norm_sm,
    norm_sm_dual_bruteforce,
    norm_smno_dual,
    norm_sml,
    norm_sml_dual_bruteforce,
    rate_certificate,
)
from .objectives import (
    DualConsensusObjective,
    SeparableObjective,
    coord_gradient_dual,
    coordinate_update,
    double_cover_sets,
    dual_value,
    make_parallel_objective,
    primal_recovery,
)
from .problems import (
    InnerSolverError,
    LogisticOracle,
    QuadraticOracle,
    make_lls,
    make_logistic,
    make_quadratic,
    make_separable,
)
from .rules import EstimatorError, estimate_lipschitz_step, search_lipschitz_step
from .scheduler import ActivationProcess, TimedTrace, communication_ledger, iteration_ledger, simulate
from .topology import (
    Topology,
    TopologyError,
    build_incidence,
    complete_graph,
    cycle_graph,
    generate_erdos_renyi,
    generate_regular,
    global_constants,
    laplacian_spectrum,
    path_graph,
    star_graph,
)

__version__ = "0.1.0"
