"""Flat portions on the boundary of numerical ranges of companion matrices.

The package decides how many straight segments the boundary of the
numerical range of an n-by-n companion matrix contains, locates each one
(supporting direction, anchor point, slope, endpoints), tests unitary
reducibility, and cross-checks every verdict against an independent
support-function boundary sampler.
"""

from .boundary import (
    BoundarySample,
    EmpiricalFlat,
    EmptyInput,
    emit_csv,
    emit_svg,
    empirical_flats,
    sample_boundary,
    support,
)
from .companion import (
    CompanionSpec,
    GammaVector,
    arrowhead_H,
    build_matrix,
    char_coeffs,
    chebyshev_basis,
    gamma_vector,
    rotate,
    tridiagonal_T,
)
from .flatness import (
    AnalysisReport,
    ConstantPolynomial,
    DetectionTolerances,
    FlatCandidate,
    FlatPortion,
    NotAnEigenpair,
    analyze,
    cond1_polynomial,
    confirm_flat,
    flat_endpoints,
    necessary_candidates,
    witness_vectors,
)
from .numcore import (
    DegreeZero,
    EigenSystem,
    NoConvergence,
    NotHermitian,
    Polynomial,
    herm_eig,
    maxnorm,
    poly_roots,
    unimodular_filter,
)
from .special import (
    ClosedFormReport,
    ReducibilityVerdict,
    WrongDimension,
    criterion_3x3,
    criterion_4x4,
    normality_2x2,
    reducibility,
    sample_spec,
    search_flat_counts,
)

__version__ = "0.1.0"
