"""Lattice constants and the calibrated values shipped in ``data/constants.toml``."""
import math
from functools import lru_cache
from importlib import resources

import tomli

SQRT3 = math.sqrt(3.0)

# site density of the triangular lattice over the Gaussian normalisation
LCLT_PREFACTOR = SQRT3 / (2.0 * math.pi)

LAMBDA_C = SQRT3 / (2.0 * math.pi * math.log(2.0))
LAMBDA_MAX = LAMBDA_C / math.e

EPSILON = 0.25  # crossing threshold in the characteristic length
TWO_ARM_EXPONENT = 0.25
EULER_GAMMA = 0.57721566490153286061


@lru_cache(maxsize=None)
def calibrated() -> dict:
    """Nested dict of calibrated constants and caps."""
    with resources.files("diffront").joinpath("data/constants.toml").open("rb") as fh:
        return tomli.load(fh)


def get(section: str, key: str):
    return calibrated()[section][key]
