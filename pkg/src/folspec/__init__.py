"""Spectral sequences of finite bigraded complexes from Riemannian foliations.

Core pieces: field-generic subspace linear algebra (exact rationals or
float64 with a rank tolerance), bigraded complexes with the three-component
differential, two independent page engines, builders for the example
geometries, and the Vaisman obstruction over Betti data.  A FastAPI service
wraps everything for JSON consumers; the CLI is a thin client of it.
"""

__version__ = "0.1.0"

from .complexes import BigradedComplex, ValidationReport
from .engine import (
    PageTable,
    Subquotient,
    adiabatic_report,
    adiabatic_spectrum,
    bk,
    cross_validate,
    direct_dims,
    e_infinity_check,
    euler_per_page,
    page_dims_direct,
    page_dims_iterated,
    stabilization_page,
    total_cohomology,
    zk,
)
from .errors import (
    BackendError,
    ContainmentError,
    DimensionMismatchError,
    FolspecError,
    InconsistentSystemError,
    ModelBuildError,
    ModelSpecError,
    NotVaismanCompatible,
)
from .fourier import FourierLayer, fourier_apply, fourier_solve
from .linalg import (
    ScalarBackend,
    Subspace,
    image_basis,
    kernel_basis,
    preimage_subspace,
    quotient_dim,
    rank,
    subspace_intersection,
    subspace_sum,
    symmetric_eigenvalues,
)
from .models import (
    DifferentialTerm,
    GeneratorSpec,
    ModelSpec,
    SuspensionData,
    build_from_presentation,
    build_kodaira_model,
    build_matrix_A,
    build_suspension_model,
    diophantine_probe,
    eigen_analysis,
    kodaira_model_spec,
    suspension_model_spec,
    sylvester_diagonal,
)
from .predictor import (
    BasicBettiVector,
    BettiVector,
    E2Prediction,
    ObstructionVerdict,
    basic_betti_from_betti,
    predict_e2,
    vaisman_obstruction,
)

__all__ = [name for name in dir() if not name.startswith("_")]
