"""k-mixup: mixup between k-point batches matched by optimal transport."""
from .errors import (
    DatasetTooSmallError,
    DegenerateDataError,
    KMixupError,
    NumericError,
    ParameterError,
    PreconditionError,
    ShapeError,
)
from .mixup import (
    KBatch,
    MixupConfig,
    VicinalBatch,
    displacement_interpolate,
    estimate_local_distribution,
    make_vicinal_step,
    sample_lambda,
    vicinal_epoch,
)
from .synthetic import Dataset, gen_clusters, gen_four_bars, gen_manifold, gen_one_ring, gen_swiss_roll, load_csv
from .transport import Assignment, cost_matrix, solve_assignment, w2_squared

__version__ = "0.1.0"

__all__ = [
    "Assignment", "Dataset", "DatasetTooSmallError", "DegenerateDataError", "KBatch",
    "KMixupError", "MixupConfig", "NumericError", "ParameterError", "PreconditionError",
    "ShapeError", "VicinalBatch", "cost_matrix", "displacement_interpolate",
    "estimate_local_distribution", "gen_clusters", "gen_four_bars", "gen_manifold",
    "gen_one_ring", "gen_swiss_roll", "load_csv", "make_vicinal_step", "sample_lambda",
    "solve_assignment", "vicinal_epoch", "w2_squared",
]
