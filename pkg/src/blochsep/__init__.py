"""Separability criteria for bipartite states in the Bloch (Fano) representation."""

from .bloch import (
    BlochForm,
    GeneratorBasis,
    StructureConstants,
    from_bloch,
    generator_basis,
    pure_state_constraints,
    single_bloch,
    structure_constants,
    to_bloch,
)
from .criteria import (
    CriterionReport,
    CriterionResult,
    analyze,
    ccnr,
    corollary1,
    ppt,
    prop1_pure_product,
    prop3,
    remark2,
    theorem1,
    theorem2,
)
from .decomp import (
    ProductDecomposition,
    ProductTerm,
    decompose,
    decompose_prop3,
    decompose_remark2,
    decompose_theorem2,
    product_split,
    verify,
)
from .matcore import (
    DensityMatrix,
    SingularSystem,
    hermitian_eigenvalues,
    is_density,
    ky_fan_norm,
    kron,
    partial_trace,
    partial_transpose,
    realign,
    svd,
)

__version__ = "0.1.0"
