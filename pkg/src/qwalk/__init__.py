"""Quantum walks on the integer line and the Fuchsian equations their limit densities satisfy."""

from .core import (
    CoinOperator,
    CtqwState,
    DtqwState,
    NonUnitary,
    OutOfSupport,
    QWalkError,
    distribution,
    hadamard,
    make_coin,
    symmetric_initial_state,
)
from .ctqw import TruncationTooSmall, ctqw_closed_form, ctqw_integrate
from .density import cdf, density_c, density_d, ks_distance, measure_density
from .dtqw import dtqw_evolve, dtqw_step, rescaled_empirical_cdf

__all__ = [
    "CoinOperator",
    "CtqwState",
    "DtqwState",
    "NonUnitary",
    "OutOfSupport",
    "QWalkError",
    "TruncationTooSmall",
    "cdf",
    "ctqw_closed_form",
    "ctqw_integrate",
    "density_c",
    "density_d",
    "distribution",
    "dtqw_evolve",
    "dtqw_step",
    "hadamard",
    "ks_distance",
    "make_coin",
    "measure_density",
    "rescaled_empirical_cdf",
    "symmetric_initial_state",
]
