"""Exact-arithmetic toolkit for tripartite no-signalling boxes.

Boxes are tables of rational conditional probabilities.  The package builds
the standard extremal examples, wires two parties of a tripartite box into
an effective bipartite box, evaluates Bell functionals over the full
relabelling orbit, and decides membership in the local and one-way
time-ordered sets by exact linear programming with checkable certificates.
"""

from .bell import (
    GyniWeights,
    IcVerdict,
    chsh,
    chsh_max,
    correlator_table,
    dumps_gyni_weights,
    gyni_bound,
    gyni_value,
    ic_witness,
    k_value,
    parse_gyni_weights,
    sos_identity_check,
    uffink,
    uffink_max,
)
from .boxes import (
    CLASS4_CONSTRAINTS,
    ArityError,
    Box2,
    Box3,
    BoxError,
    ConstraintSet,
    ContradictionError,
    InvalidBoxError,
    ParseError,
    Relabeling,
    SignallingError,
    UnknownBuiltinError,
    ValidationReport,
    all_relabelings2,
    build_from_constraints,
    builtin,
    correlator,
    dump,
    dumps,
    index2,
    index3,
    load,
    loads,
    marginal,
    mix,
    relabel,
    require_valid,
    validate,
)
from .lp import LPCertificate, LPError, LPProblem, lp_feasible
from .membership import (
    ToblModel,
    class4_tobl_model,
    decode_lambda,
    is_local,
    is_tobl,
    lambda_index,
    local_problem,
    tobl_problem,
    verify_model,
)
from .wiring import (
    BIPARTITIONS,
    Bipartition,
    EffectiveBoxDerivation,
    Wiring,
    apply_wiring,
    apply_wiring_fixed_inputs,
    derive_effective_box,
    distinct_effective_boxes,
    enumerate_wirings,
    search_max,
    search_max_all,
)

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "BIPARTITIONS",
    "Bipartition",
    "Box2",
    "Box3",
    "BoxError",
    "CLASS4_CONSTRAINTS",
    "ConstraintSet",
    "ContradictionError",
    "EffectiveBoxDerivation",
    "GyniWeights",
    "IcVerdict",
    "InvalidBoxError",
    "LPCertificate",
    "LPError",
    "LPProblem",
    "ParseError",
    "Relabeling",
    "SignallingError",
    "ToblModel",
    "UnknownBuiltinError",
    "ValidationReport",
    "Wiring",
    "all_relabelings2",
    "apply_wiring",
    "apply_wiring_fixed_inputs",
    "build_from_constraints",
    "builtin",
    "chsh",
    "chsh_max",
    "class4_tobl_model",
    "correlator",
    "correlator_table",
    "decode_lambda",
    "derive_effective_box",
    "distinct_effective_boxes",
    "dump",
    "dumps",
    "dumps_gyni_weights",
    "enumerate_wirings",
    "gyni_bound",
    "gyni_value",
    "ic_witness",
    "index2",
    "index3",
    "is_local",
    "is_tobl",
    "k_value",
    "lambda_index",
    "load",
    "loads",
    "local_problem",
    "lp_feasible",
    "marginal",
    "mix",
    "parse_gyni_weights",
    "relabel",
    "require_valid",
    "search_max",
    "search_max_all",
    "sos_identity_check",
    "tobl_problem",
    "uffink",
    "uffink_max",
    "validate",
    "verify_model",
]
