"""Splitting-based implicit Runge-Kutta methods in a partitioned tableau framework."""

from .integrator import (
    FunctionPartition,
    IntegrationResult,
    LinearPartition,
    NewtonError,
    PartitionedOde,
    Stepper,
    StepperConfig,
    dense_staged_oracle_step,
    integrate,
    step,
    thomas_solve,
)
from .methods import (
    REGISTRY,
    FsrkSpec,
    adi_gark3,
    adi_gark4,
    build_method,
    catalog_tableaus,
    douglas,
    douglas_modified_first,
    douglas_modified_last,
    fsrk_to_gark,
    hundsdorfer_verwer,
    lod_backward_euler,
    modified_craig_sneyd,
    strang,
    trapezoidal_splitting,
    yanenko_lod_cn,
    yanenko_parallel,
    yanenko_symmetric,
    yoshida4,
)
from .order_conditions import (
    ConditionResidual,
    classical_order,
    coupling_residuals_special,
    residuals_up_to,
    rk_order,
)
from .problems import dahlquist, fit_order, heat2d, heat3d, l2_error, l2_error_raw
from .rk import RkTableau
from .stability import (
    scan_region,
    stability_value,
    stiff_limit_esdirk,
    stiff_limit_invertible,
)
from .tableau import (
    AssemblyMode,
    GarkTableau,
    NonstiffBlocks,
    StagePermutation,
    StructuredTableau,
    assemble_structured,
    find_imim_permutation,
    is_internally_consistent,
    is_stiffly_accurate,
    permute,
    vec_permutation,
)

__version__ = "0.1.0"
