"""Dictionary selection by (k, p)-overcomplete joint sparse approximation."""
from ._kernels import BACKEND
from .analysis import (
    SubspaceCount,
    binary_entropy,
    check_boundedness,
    check_uniqueness_sufficient,
    spark_exceeds,
    subspace_reduction,
)
from .datagen import PlantedProblem, gen_problem, recovery_success
from .errors import (
    NumericError,
    PreconditionError,
    RefusalError,
    ShapeError,
    ZeroGradient,
)
from .iht import IhtConfig, evaluate_dictionary, iht_approx
from .linop import DctDiracDictionary, DenseDictionary, MotherDictionary
from .solver import (
    SolverConfig,
    SolverReport,
    StopReason,
    extract_dictionary,
    gradient,
    masked_step_size,
    objective,
    select,
)
from .sparsity import (
    ConstraintMode,
    ModelParams,
    Support,
    project_K,
    project_KP,
    project_P,
    selected_atoms,
    support_of,
)

__version__ = "0.1.0"
