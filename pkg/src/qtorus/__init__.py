"""Difference-operator representations of Yangians and quantum groups.

Generators are built in skew algebras over exact multivariate rational
functions, and every defining relation is checked by normal-form reduction.
"""

__version__ = "0.1.0"

from .cartan import CartanData, RepConfig, cartan_from_matrix, cartan_from_type, make_config
from .generators import GeneratorSet, build, extract_modes, zero_mode_generators
from .relations import (
    VerificationReport,
    q_binomial,
    verify,
    verify_qaffine,
    verify_randomized,
    verify_uqg,
    verify_yangian,
)

__all__ = [
    "CartanData",
    "GeneratorSet",
    "RepConfig",
    "VerificationReport",
    "build",
    "cartan_from_matrix",
    "cartan_from_type",
    "extract_modes",
    "make_config",
    "q_binomial",
    "verify",
    "verify_qaffine",
    "verify_randomized",
    "verify_uqg",
    "verify_yangian",
    "zero_mode_generators",
]
