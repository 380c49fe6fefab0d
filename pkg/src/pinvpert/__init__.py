"""Moore-Penrose inverse perturbation analysis with finite-dimensional surrogates.

Modules
-------
linalg_core
    SVD oracle, subspaces, projectors, weighted adjoints, checked solvers.
graph_space
    Graph-norm geometry ``W = I + T^* T`` and T-boundedness certificates.
geninv
    Moore-Penrose inverses recovered from (1,2)-inverses and from products.
perturb
    Stability predicates, the perturbed closed form and its bounds.
lstsq
    Least-squares solution sets under operator and data perturbation.
harness
    Generators, file formats, reports and sweeps behind the CLI.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConstructionError,
    DimensionError,
    FormulaBreakdownError,
    InvalidInputError,
    InvalidWeightError,
    NotInvertibleError,
    NotStableError,
    NumericalInconsistencyError,
    ParseError,
    PinvPertError,
)
from .linalg_core import numerical_rank, pinv_oracle, svd_split  # noqa: E402
from .perturb import (  # noqa: E402
    make_instance,
    perturbed_mp,
    stability_predicates,
    verify_bounds,
)

__all__ = [
    "ConstructionError",
    "DimensionError",
    "FormulaBreakdownError",
    "InvalidInputError",
    "InvalidWeightError",
    "NotInvertibleError",
    "NotStableError",
    "NumericalInconsistencyError",
    "ParseError",
    "PinvPertError",
    "make_instance",
    "numerical_rank",
    "perturbed_mp",
    "pinv_oracle",
    "stability_predicates",
    "svd_split",
    "verify_bounds",
]
