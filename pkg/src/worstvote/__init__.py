"""Exact worst-case guarantee analysis for probabilistic voting and bargaining.

The package decides, with exact rational arithmetic throughout, which rank
guarantees are achievable for n agents choosing among p outcomes, which of
those are unimprovable, and which executable protocols deliver them.
"""

from .lottery import (
    RankLottery,
    convex_combination,
    dominates,
    feasible_n2,
    format_lottery,
    is_symmetric,
    lottery,
    m2_vertices,
    parse_lottery,
    rd,
    uniform,
    vt,
)
from .profiles import (
    OutcomeLottery,
    Preference,
    Profile,
    canonicalize,
    cyclic_pad_profile,
    enumerate_profiles,
    k_tail,
    parse_profile,
    profile,
    rank_rearrange,
)
from .duality import (
    BoundaryDecomposition,
    anti_radius_point,
    boundary_decompose,
    dual,
    radius_point,
)
from .compose import (
    CanonicalSequence,
    canonical,
    canonical_word,
    enumerate_canonical,
    rd_compose,
    support_table,
    vt_compose,
    word_simplex,
)
from .feasibility import (
    BalancedFamily,
    FeasibilityReport,
    balanced_family,
    cardinal_falsifier,
    implement_at,
    is_feasible,
    necessary_cuts,
)
from .maximality import (
    MaximalityReport,
    PolarCertificate,
    check_polar_certificate,
    forcing_profile,
    improve,
    is_maximal,
)
from .protocols import (
    EvalReport,
    ProtocolSpec,
    claimed_guarantee,
    cover_protocol,
    parse_protocol,
    run,
    verify_safe_strategy,
    worst_case_guarantee,
)

__version__ = "0.1.0"
