"""Exact colorability defects and chromatic numbers of almost stable Kneser hypergraphs."""

from .core import (
    Family,
    GuardExceeded,
    InternalInvariantViolation,
    PreconditionError,
    Subset,
    complete_k_family,
    is_almost_s_stable,
    is_s_stable,
    restrict,
    stable_subfamily,
    subset_compare,
)
from .defect import DefectCertificate, ecd, ecd_formula_complete, is_valid_certificate
from .kneser import (
    Coloring,
    chromatic_number,
    edges,
    find_monochromatic_edge,
    greedy_min_element_coloring,
    is_proper,
)
from .tucker import (
    SignedFace,
    ZpFace,
    alt,
    audit_tucker_z2,
    audit_zptucker,
    faces_z2,
    faces_zp,
    lambda_z2,
    lambda_zp,
    max_stable_subface,
    sgn_z2,
    sgn_zp,
    z2_context,
    zp_context,
)
from .verify import (
    BoundReport,
    FamilyGenerator,
    conjecture_check,
    counterexample_scan,
    lemma_compose_witness,
    thm1_check,
    thm2_check,
)

__version__ = "0.1.0"
