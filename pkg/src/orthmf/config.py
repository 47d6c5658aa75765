"""Runtime configuration with environment overrides.

``ORTHMF_SIZE_CAP`` bounds the tensor dimension n**d handled by the exact
kernels, ``ORTHMF_TOL`` is the relative tolerance of numeric identities.
"""
import os

DEFAULT_SIZE_CAP = 4096
DEFAULT_TOL = 1e-9
DEFAULT_MAX_TAYLOR_DEGREE = 8
DEFAULT_HEIGHT_BOUND = 10


def size_cap() -> int:
    value = int(os.environ.get("ORTHMF_SIZE_CAP", DEFAULT_SIZE_CAP))
    if value <= 0:
        raise ValueError("ORTHMF_SIZE_CAP must be positive")
    return value


def tolerance() -> float:
    value = float(os.environ.get("ORTHMF_TOL", DEFAULT_TOL))
    if value <= 0:
        raise ValueError("ORTHMF_TOL must be positive")
    return value
