"""Static ergodicity verifier for stochastic mass-action reaction networks."""

from .drift import (
    DriftSystem,
    LyapunovCertificate,
    ReactionClassification,
    build_drift_system,
    certificate_from_witness,
    check_negative_drift,
    classify_reactions,
    verify_certificate,
)
from .errors import (
    DimensionMismatch,
    DuplicateSpecies,
    ErgocheckError,
    MissingTotals,
    NonPositiveRate,
    OverlappingConservation,
    ParseError,
    PropensityOverflow,
    StateSpaceTooLarge,
    UnsupportedReactionOrder,
    WitnessRejected,
)
from .irreducibility import (
    ConservedClassAnalysis,
    IrreducibilityVerdict,
    LevelDecomposition,
    check_irreducibility,
    conserved_class_analysis,
    fireable_reactions,
    level_decomposition,
    level_decomposition_conserved,
)
from .lfp import LfpOutcome, LfpProblem, solve_lfp, witness_satisfies
from .linalg import (
    HnfResult,
    RationalMatrix,
    hermite_normal_form,
    lattice_spans_full,
    left_null_space,
    null_space,
    rank,
)
from .network import (
    ConservedStructure,
    NetworkStructure,
    Reaction,
    ReactionNetwork,
    enumerate_conserved_states,
    find_conservation_relations,
    inverse_structure,
    network_to_text,
    parse_network,
    propensity,
    reorder_conserved_last,
    stoichiometry_matrix,
)
from .oracle import (
    StationaryEstimate,
    Trajectory,
    batch_means,
    empirical_irreducibility_probe,
    gillespie_simulate,
    time_average,
    truncated_cme_stationary,
)
from .report import (
    INCONCLUSIVE,
    IRREDUCIBILITY_DISPROVEN,
    PROVEN_ERGODIC,
    UNSUPPORTED,
    ErgodicityReport,
    analyze,
    parse_report,
    render_report,
    report_to_dict,
    verify,
)

__version__ = "0.1.0"
