"""Region-of-interest X-ray tomography toolkit on regular grids.

Scalar and vector line transforms with exact discrete transposes, Riesz
normal operators by two independent routes, spectral fractional Laplacians
and the full-data inversion formulas, constant-coefficient operator priors,
and constrained partial-data solvers that exhibit uniqueness from
region-limited line data.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ExponentError,
    GeometryError,
    GridMismatchError,
    NotAGradientError,
    RegionError,
    SolverFailure,
)
from .grid import (
    Grid,
    RegionMask,
    ScalarField,
    VectorField,
    disk_mask,
    empty_mask,
    from_spectrum,
    full_mask,
    inner_product,
    spectral_inner,
    to_spectrum,
    vector_inner_product,
)
from .phantoms import PhantomSpec, sample_phantom
from .lines import Line, LineSet, filter_roi, line_meets_region, make_lineset
from .project import Projector
from .xray_scalar import (
    Sinogram,
    normal_scalar,
    normal_scalar_conv,
    sino_inner,
    xray_backproject,
    xray_forward,
)
from .fraclap import (
    ReconstructionConstants,
    analytic_c0,
    analytic_c1,
    analytic_constants,
    calibrate_constants,
    fractional_laplacian,
    reconstruct_full_scalar,
)
from .diffops import (
    Admissibility,
    PolyOp,
    apply_fd,
    compose,
    is_admissible,
    laplacian_power,
    partial_op,
    symbol_eval,
    unit_op,
    zero_set_fraction,
)
from .xray_vector import (
    SkewField,
    curl_normal_identity_defect,
    exterior_derivative,
    gradient,
    normal_vector,
    normal_vector_conv,
    recover_potential,
    reconstruct_full_solenoidal,
    solenoidal_decompose,
    xray_vector_backproject,
    xray_vector_forward,
)
from .solver import (
    PartialDataProblem,
    ProbeResult,
    SolveReport,
    null_space_probe,
    solve_scalar_partial,
    solve_vector_partial,
)
