"""Randomised product-formula and QDRIFT simulation of Markovian open quantum
systems, with diamond-norm error certification."""

from .formulas import (
    Direction,
    Implementation,
    Method,
    StepBound,
    error_bound,
    gate_count,
    qdrift_exact,
    qdrift_probs,
    s1_dir,
    s1_ran_exact,
    s2_det,
    s2_ran_exact,
    s2_sigma,
    step_count,
)
from .forking import (
    ForkLayout,
    cswap_channel,
    fork_qdrift_run,
    fork_qdrift_step,
    fork_s1_run,
    fork_s1_step,
)
from .harness import (
    ExperimentSpec,
    SweepRecord,
    fit_order,
    load_experiment,
    run_sweep,
    table1_report,
    validate_all,
)
from .lindblad import (
    GkslGenerator,
    choi,
    constituent_channel,
    exact_channel,
    full_liouvillian,
    is_cptp,
    load_generator,
    parse_generator,
    term_superop,
)
from .linalg import (
    DensityMatrix,
    devectorize,
    kron,
    mat_exp,
    partial_trace,
    trace_distance,
    trace_norm,
    vectorize,
)
from .models import builtin_model
from .norms import GeneratorStats, diamond_norm, generator_stats, power_contraction_check
from .sampling import (
    GateSet,
    apply_gateset,
    draw_gateset,
    gateset_channel,
    mixture_estimate,
    sample_gateset,
)
from .tolerances import TOL, Tolerances

__version__ = "0.1.0"
