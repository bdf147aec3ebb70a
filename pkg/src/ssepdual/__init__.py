"""Matrix-product intertwiners between boundary-driven and equilibrium SSEP."""

from .intertwiner import (
    AuxWindow,
    ConstraintViolated,
    Direction,
    EquilibriumRatesError,
    MpoIntertwiner,
    PoleError,
    build_G,
    build_G_prime,
    build_rep,
    build_Y,
    closure_check,
    compose_tilde_G,
    contract,
)
from .observables import CorrelatorSpec, XConvention, correlate_direct, correlate_dual
from .ssep_model import (
    BoundaryKind,
    BoundaryRates,
    ProcessSpec,
    Side,
    YVariant,
    assemble_generator,
    assemble_H,
    build_dual_rates,
    dual_rates,
)
from .steady_state import SteadyState, build_bernoulli, build_dehp_mps, build_oracle, map_through
from .verification import CheckReport, SuiteConfig, run_suite

__version__ = "0.1.0"
