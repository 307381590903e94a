"""Solvers and oracles for maximizing geometric means of PSD forms on the sphere."""

from .errors import (
    DegenerateInnerProduct,
    DegenerateMoments,
    DomainError,
    FormulaSingular,
    GeomeanError,
    InvalidInput,
    NotPSD,
    NotPositiveDefinite,
    ParseError,
    TooManySubsets,
    UnsupportedDimension,
)
from .fields import (
    DensityMatrix,
    Field,
    SpectralDecomposition,
    eigh,
    gram_factor,
    project_spectrahedron,
    sample_gaussian,
    sample_sphere_uniform,
    substream,
    symmetrize,
)
from .instances import (
    GraphSpec,
    ProblemInstance,
    complete_graph,
    evaluate,
    gen_icosahedral,
    gen_kantorovich,
    gen_maxcut,
    gen_monomial,
    gen_random_rank_one,
    gen_rank_one,
    icosahedral_maximizers,
    parse_graph,
    parse_instance,
    prism_graph,
    serialize_graph,
    serialize_instance,
)
from .oracle import OracleResult, cube_max, grid_max_sphere, local_max_sphere
from .rounding import (
    GuaranteeVerdict,
    RoundingOutcome,
    approx_factor,
    check_rounding_guarantee,
    round_gaussian,
)
from .sdp import ExactnessHint, SolveReport, amgm_eigen_bound, dual_certificate, exactness_hint, solve_optsdp
from .sos import (
    MomentVector,
    MonomialBasis,
    ProductFormFunctional,
    SosReport,
    elementary_symmetric,
    moment_matrix,
    moments_from_doc,
    moments_to_doc,
    monomial_basis,
    point_moments,
    product_form_functional,
    round_sos,
    solve_optsos,
    solve_srel,
    uniform_sphere_moments,
)
from .specials import (
    EULER_GAMMA,
    C_nk,
    EigenvalueProfile,
    L_r,
    digamma,
    expected_log_genchisq,
    kantorovich_bound,
    monomial_max,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
