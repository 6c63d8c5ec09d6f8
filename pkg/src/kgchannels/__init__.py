"""Free Klein-Gordon field on a periodic lattice, localized rotation channels and the
Alice/Bob/Charlie signaling scenario, classically and in the vacuum."""

from .classical import (
    BracketContext,
    DiracState,
    KickChannel,
    PolynomialFunctional,
    RotationChannel,
    apply_channel,
    apply_channel_to_state,
    eval_functional,
    peierls_bracket,
)
from .config import ScenarioConfig, default_config
from .errors import KGChannelsError
from .fields import BumpProfile, SpatialGrid, TestFunction
from .geometry import Ball, DoubleCone, Point, ScenarioGeometry, are_spacelike, contains
from .green import (
    CauchyData,
    KGImage,
    KGParams,
    Solution,
    SourceSum,
    evolve,
    green_cauchy_data,
    green_solution,
    leapfrog_evolve,
    pairing_G,
)
from .quantum import VacuumContext, WeylWord, tn_expectation_defect, two_point, weyl_vacuum
from .rotation import LocalizedRotation, apply_S, gamma, gamma_inverse, jacobian_det
from .scenario import run_classical, run_quantum, validate_config
from .suite import run_convergence, run_validation_suite
from .symplectic import kappa, linear_functional, sigma

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BracketContext",
    "BumpProfile",
    "CauchyData",
    "DiracState",
    "DoubleCone",
    "KGChannelsError",
    "KGImage",
    "KGParams",
    "KickChannel",
    "LocalizedRotation",
    "Point",
    "PolynomialFunctional",
    "RotationChannel",
    "ScenarioConfig",
    "ScenarioGeometry",
    "Solution",
    "SourceSum",
    "SpatialGrid",
    "TestFunction",
    "VacuumContext",
    "WeylWord",
    "apply_S",
    "apply_channel",
    "apply_channel_to_state",
    "are_spacelike",
    "contains",
    "default_config",
    "eval_functional",
    "evolve",
    "gamma",
    "gamma_inverse",
    "green_cauchy_data",
    "green_solution",
    "jacobian_det",
    "kappa",
    "leapfrog_evolve",
    "linear_functional",
    "pairing_G",
    "peierls_bracket",
    "run_classical",
    "run_convergence",
    "run_quantum",
    "run_validation_suite",
    "sigma",
    "tn_expectation_defect",
    "two_point",
    "validate_config",
    "weyl_vacuum",
]
