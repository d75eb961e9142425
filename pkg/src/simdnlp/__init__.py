"""simdnlp: table-driven nonlinear programming.

Models are built from scalar kernels iterated over data tables, compiled
into immutable models with exact sparse first- and second-order derivative
callbacks, and solved with the bundled interior-point method.  A power
systems layer constructs static, multi-period, and storage-equipped AC
optimal power flow models from MATPOWER case files.
"""

from .autodiff import (
    CompressedPattern,
    EvalDomainError,
    compress_coordinates,
    eval_constraints,
    eval_gradient,
    eval_hessian,
    eval_jacobian,
    eval_objective,
    hessian_structure,
    jacobian_structure,
)
from .core import (
    CompiledModel,
    ConstraintAugment,
    ConstraintBlock,
    DataTable,
    ModelCore,
    ModelError,
    ObjectiveBlock,
    VariableBlock,
    extract_solution,
    new_core,
)
from .expressions import Expr, cos, exp, field, log, sin, sqrt
from .matpower import (
    BranchAdmittance,
    CaseData,
    CaseError,
    branch_admittance,
    parse_case,
    parse_case_file,
    parse_load_series,
    validate_case,
)
from .opf import (
    add_storage,
    apply_user_callback,
    mpopf_model,
    mpopf_model_series,
    opf_model,
    storage_complementarity_violation,
)
from .problems import luksan_vlcek_model
from .solver import (
    SolveResult,
    SolverOptions,
    Timings,
    bound_violation,
    constraint_violation,
    kkt_residuals,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "CompiledModel",
    "CompressedPattern",
    "ConstraintAugment",
    "ConstraintBlock",
    "DataTable",
    "EvalDomainError",
    "Expr",
    "ModelCore",
    "ModelError",
    "ObjectiveBlock",
    "VariableBlock",
    "BranchAdmittance",
    "CaseData",
    "CaseError",
    "SolveResult",
    "SolverOptions",
    "Timings",
    "add_storage",
    "apply_user_callback",
    "bound_violation",
    "branch_admittance",
    "compress_coordinates",
    "constraint_violation",
    "cos",
    "eval_constraints",
    "eval_gradient",
    "eval_hessian",
    "eval_jacobian",
    "eval_objective",
    "exp",
    "extract_solution",
    "field",
    "hessian_structure",
    "jacobian_structure",
    "kkt_residuals",
    "log",
    "luksan_vlcek_model",
    "mpopf_model",
    "mpopf_model_series",
    "new_core",
    "opf_model",
    "parse_case",
    "parse_case_file",
    "parse_load_series",
    "sin",
    "solve",
    "sqrt",
    "storage_complementarity_violation",
    "validate_case",
]
