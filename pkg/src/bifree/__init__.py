"""Two-faced noncommutative probability toolkit.

Exact symbolic layer: noncommutative polynomials over left/right letters
(:mod:`bifree.ncalg`), bi-non-crossing partition lattices
(:mod:`bifree.bnclattice`), moment/cumulant transforms
(:mod:`bifree.cumulant`), and the difference quotients with their adjoints
and conjugate-variable checks (:mod:`bifree.derivation`).

Numerical layer: central-limit families from a covariance matrix with
Fisher information, entropy, and entropy dimension
(:mod:`bifree.gaussfam`), and grid-based conjugate variables and Fisher
information for commuting pairs (:mod:`bifree.bipartite_num`).
"""

from .ncalg import (
    AlgebraMode,
    Letter,
    NCPolynomial,
    TensorPoly,
    bipartite_mode,
    free_mode,
    lsym,
    lvar,
    mul,
    normal_form,
    parse_poly,
    format_poly,
    parse_tensor,
    format_tensor,
    rsym,
    rvar,
    star,
    tensor_mul,
    tensor_star,
)
from .bnclattice import (
    BNCPartition,
    enumerate_bnc,
    hat_embed,
    hat_zero,
    is_bnc,
    join,
    mobius,
    one_partition,
    sigma_chi,
    zero_partition,
)
from .cumulant import (
    CumulantMomentFunctional,
    CumulantSpec,
    MomentFunctional,
    TableMomentFunctional,
    check_mixed_vanishing,
    cumulant_chi,
    expand_product_last_entry,
    gaussian_cumulant_spec,
    moment_pi,
    moments_from_cumulants,
)
from .derivation import (
    ConjugateReport,
    QuotientKind,
    adjoint_apply,
    bifree_dq,
    conjugate_check,
    free_dq,
    scalar_identity_residual,
)
from .gaussfam import (
    Covariance,
    FockModel,
    build_fock_model,
    conjugate_coeffs,
    entropy_closed,
    entropy_dimension,
    entropy_dimension_limit,
    entropy_quadrature,
    fisher,
    fisher_perturbed,
    fock_moment,
    gaussian_moment,
)
from .bipartite_num import (
    ConjugateField,
    DensityGrid,
    FieldConfig,
    GridSpec,
    MarginalDensity,
    conjugate_field,
    fisher_numeric,
    hilbert_pv,
    marginals,
    semicircular_density,
)

__version__ = "0.1.0"
