"""Dual frames compensating for erased frame coefficients."""
from .channel import TransmissionReport, random_erasure, transmit
from .erasure import (
    ErasureGram,
    ErasureSet,
    EquivalenceReport,
    Method,
    ReducedDual,
    equivalence_check,
    erasure_gram,
    iterative_families,
    mrc_check,
    reconstruct,
    reduced_dual,
    reduced_dual_gram,
    reduced_dual_iterative,
    reduced_dual_operator,
)
from .errors import (
    BadK,
    BadShape,
    ConditionExceeded,
    ConstructionError,
    DenominatorVanishes,
    DimensionMismatch,
    IllConditioned,
    MrcRetryExhausted,
    MrcViolated,
    NotADual,
    NotAFrame,
    SingularGram,
    SingularOperator,
)
from .frames import (
    DualPair,
    Frame,
    FrameBounds,
    analysis,
    canonical_dual,
    dual_pair,
    duality_error,
    frame_bounds,
    frame_operator,
    make_frame,
    pinv_dual,
    random_dual,
    synthesis,
)

__version__ = "0.1.0"
