"""Multi-category proportional-reduction-in-error association measures for two-way tables."""

from .errors import PreLambdaError
from .inference import InferenceResult, confidence_interval
from .measures import (
    Direction,
    Family,
    MeasureResult,
    lambda_k_t,
    lambda_t,
    measure,
    measure_profile,
    symmetric_lambda,
    symmetric_weights,
)
from .normal import NormalGridSpec, build_normal_table, bvn_rectangle, sample_multinomial, sweep
from .tables import (
    ContingencyTable,
    ProbabilityTable,
    build_independent,
    normalize,
    select_top_k,
    transpose,
    validate_probability_table,
)

__version__ = "0.1.0"
