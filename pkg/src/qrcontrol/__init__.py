"""Control-variable estimation of structural functions in triangular models."""

from .design import (
    BasisSpec,
    Dataset,
    DgpSpec,
    TrueStructure,
    build_w,
    discretize_design1,
    discretize_design2,
    make_preset,
    read_dataset_csv,
    simulate,
    write_dataset_csv,
)
from .first_stage import ControlFunction
from .quantreg import (
    CheckLossProblem,
    QuantileFit,
    QuantileProcess,
    SolverConfig,
    check_loss,
    fit,
    fit_process,
)
from .second_stage import QuantileCRF
from .structural import (
    EvaluationMesh,
    RegionEstimate,
    StructuralFunctionEstimate,
    StructuralFunctionEstimator,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSpec",
    "CheckLossProblem",
    "ControlFunction",
    "Dataset",
    "DgpSpec",
    "EvaluationMesh",
    "QuantileCRF",
    "QuantileFit",
    "QuantileProcess",
    "RegionEstimate",
    "SolverConfig",
    "StructuralFunctionEstimate",
    "StructuralFunctionEstimator",
    "TrueStructure",
    "build_w",
    "check_loss",
    "discretize_design1",
    "discretize_design2",
    "fit",
    "fit_process",
    "make_preset",
    "read_dataset_csv",
    "simulate",
    "write_dataset_csv",
    "__version__",
]
