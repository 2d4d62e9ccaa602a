import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from detsum import builtin

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_RANK = ("gaussian", "nf-sqrt5", "nf-sqrt2", "alamouti", "l1", "l2")
ALL_CODES = SMALL_RANK + ("golden-order",)
DIVISION_CODES = ("alamouti", "l1", "l2", "golden-order")


@pytest.fixture(params=ALL_CODES)
def any_code(request):
    return builtin(request.param)


@pytest.fixture(params=SMALL_RANK)
def small_code(request):
    return builtin(request.param)


def box_scan(L, M):
    """Naive oracle: every nonzero z in a box that provably contains L(M)."""
    import itertools

    ginv = np.linalg.inv(L.gram)
    R = [int(np.ceil(M * np.sqrt(ginv[i, i]))) for i in range(L.k)]
    out = set()
    for z in itertools.product(*(range(-r, r + 1) for r in R)):
        if any(z) and L.sqnorm(z) <= M * M:
            out.add(z)
    return out
