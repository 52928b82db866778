"""Hop-based finitary quantum amplitudes and their machine semantics.

The package computes time-sliced composite amplitudes phi_n by transfer
matrix dynamic programming, solves the normalization factors B_n of the
hop-based reformulation so that the n-hop amplitudes psi_n reproduce the
corrections phi_n - phi_{n-1}, compiles hop paths into additive X-machines
that compute their own amplitudes, and verifies the whole construction at
desk scale.
"""

from .action import (
    Conjugate,
    Free,
    Harmonic,
    Kind,
    PhysicalSystem,
    Region,
    SelfConjugate,
    SpacetimePoint,
    anti_action,
    classical_action,
    classical_amplitude,
    lagrangian,
)
from .errors import (
    ConfigError,
    ContextMismatchError,
    DegenerateCorrectionError,
    DivergentBehaviorError,
    FocalSingularityError,
    HoppathError,
    NoActionError,
    NonFiniteIntegrandError,
    NumericalError,
    RegionError,
    SubsetBlowupError,
    TemporalOrderError,
    UnboundedLanguageError,
    UnknownSymbolError,
    UnsupportedSystemError,
)
from .finitary import (
    HopPath,
    Model,
    NormalizationTableB,
    PhaseParam,
    TailReport,
    hop_action,
    hop_amplitude,
    path_amplitude,
    psi_n,
    psi_total,
    solve_B_bidirectional,
    solve_B_unidirectional,
)
from .harness import (
    ExperimentConfig,
    Report,
    ReportRow,
    bundled_experiments,
    emit_report,
    load_config,
    run_experiment,
    verify_suite,
)
from .quadrature import QuadratureSpec, integrate_1d, integrate_2d
from .standard import (
    ConvergenceReport,
    NormalizationTableA,
    SliceGrid,
    delta_phi,
    free_propagator,
    free_propagator_self_composition,
    normalization_A,
    normalization_table_A,
    phi_limit_estimate,
    phi_n,
    phi_n_whole_line,
)
from .xmachine import (
    AdditiveXMachine,
    CoverSemantics,
    FiniteStateMachine,
    GeneralLabeling,
    MultiplierLabeling,
    additive_behavior_closed,
    additive_behavior_truncated,
    compile_path_to_machine,
    loop_resummation,
    machine_behavior,
    machine_from_text,
    machine_to_text,
    paths_equivalent,
    recognizes,
    sum_over_machines,
    universal_relation_machine,
    word_relation,
)

__version__ = "0.1.0"
