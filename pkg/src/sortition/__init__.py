"""Committee-based voting rules on binary multi-issue preference profiles.

Exact and Monte Carlo expected social cost, approximation ratios, adversarial
profile generators and closed-form bound calculators.
"""

from .bounds import (
    BoundReport,
    kmaj3_exact_limit,
    kmaj_lower_bound,
    kmaj_upper_bound,
    krep_iid_upper_bound,
    krep_many_issue_lower,
    krep_one_issue_ar,
    normal_cdf,
    optimal_k_scan,
    regret,
)
from .config import DEFAULT_CAPS, Caps, load_caps
from .errors import (
    DimensionError,
    GenerationError,
    ProfileParseError,
    ResourceLimitError,
    SortitionError,
    ValidationError,
)
from .exact_eval import (
    EvalReport,
    HypergeomParams,
    ar_one_issue_kmaj,
    enumerate_expected_cost,
    expected_cost,
    hypergeom_pmf,
    kmaj_expected_cost_exact,
    optimal_issue_wise_thresholds,
    p_committee_selects_one,
    permutation_average_cost,
)
from .metrics import CostRatio, cost_ratio, hamming, optimal_cost, optimal_outcome, social_cost
from .montecarlo import MCEstimate, mc_expected_cost, mc_ratio
from .profiles import (
    PreferenceProfile,
    SingleIssueSpec,
    clone_issues,
    complement,
    equidistant_profile,
    iid_issue_profile,
    read_profile,
    single_issue,
    two_cluster_profile,
    write_profile,
)
from .rules import RULE_IDS, Committee, delegation_weights, mindist_committee_rule

__all__ = [name for name in dir() if not name.startswith("_")]
