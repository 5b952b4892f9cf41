"""Categorical GLMs specified by a ratio r, a cdf F and a design matrix Z."""

from .data import Dataset, contingency_table, grouped, load_csv, simulate
from .design import DesignKind, build_design, make_transform, parse_design
from .distributions import CdfSpec, cdf_eval, parse_cdf, pdf_eval, quantile, reflect
from .errors import (
    CatGLMError,
    ConstraintViolation,
    ConvergenceWarning,
    CyclicConstraintError,
    DomainError,
    HypothesisError,
    ModelUndefinedError,
    NumericalFailure,
    SingularInformationError,
)
from .experiments import hasse_consistent_permutations, kfold_cv, ordering_search, permutation_scan
from .fit import Controls, FittedModel, classify, fisher_scoring, predict_proba, predict_probabilities
from .model import ModelSpec, category_probabilities, make_spec
from .ratios import ratio_apply, ratio_invert, ratio_jacobian
from .results import emit_result, parse_result
from .transforms import make_plan, permute_model, verify_pointwise_equality

__version__ = "0.1.0"
