"""Steady states of boundary-driven TXY and three-spin-interaction qubit chains."""

from .chains import (
    BathSpec,
    ChainSpec,
    MajoranaForm,
    attach_auxiliary,
    build_3si_majorana,
    build_majorana,
    build_txy_majorana,
    duality_map,
    full_params,
    reduced_params,
)
from .observables import (
    NessObservables,
    g2_end_to_end,
    ness_observables,
    pair_expectation,
    quartic_wick,
    sz,
)
from .thirdquant import (
    BathMatrix,
    CorrelationMatrix,
    DriftPair,
    build_bath_matrix,
    build_drift,
    residual,
    solve_ness,
    steady_state,
)

__version__ = "0.1.0"
