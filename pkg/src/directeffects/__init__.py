"""Recovering direct effects among correlated binary predictors.

Submodules: ``simgen`` (synthetic data), ``penreg`` (penalized logistic
regression, cross-validation, Wald and Fisher tests), ``selectors`` (the six
selection methods), ``metrics`` (find scoring), ``snpio`` (genotype encoding
and the dataset file format) and ``bench`` (experiment runner and CLI).
"""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DataError,
    DegenerateResponseError,
    DirectEffectsError,
    ParseError,
    SchemaError,
    UsageError,
)
from .metrics import AggregateMetrics, FindMetrics, aggregate, score, score_hct
from .penreg import (
    CoefficientVector,
    CvResult,
    PathResult,
    PenaltySpec,
    WaldFit,
    cv_select,
    fisher_exact,
    fit_penalized,
    fit_wald,
    path,
)
from .selectors import (
    METHODS,
    CvSettings,
    DetConfig,
    SelectionResult,
    StabilityConfig,
    run_method,
    select_det,
    select_enet,
    select_fisher,
    select_lasso,
    select_screen_clean,
    select_stability,
)
from .simgen import (
    BinaryMatrix,
    ClusterConfig,
    GroundTruth,
    SerialConfig,
    assign_causal,
    calibrate_intercept,
    gen_clustered,
    gen_response,
    gen_serial,
    simulate_replicate,
)
from .snpio import EncodedDataset, GenotypeMatrix, encode, prevalence_filter, read_dataset, write_dataset

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
