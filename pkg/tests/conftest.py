from __future__ import annotations

import math

import pytest
from hypothesis import settings

from torrec.spectral import IntMatrix

settings.register_profile("torrec", deadline=None, max_examples=100)
settings.load_profile("torrec")

CAT = IntMatrix.of([[2, 1], [1, 1]])
ACCEPTANCE_MATRICES = [
    [[2, 1], [1, 1]],
    [[3, 1], [1, 1]],
    [[2, 1], [1, 0]],
    [[4, 1], [1, 1]],
]
L_CAT = math.log((3 + math.sqrt(5)) / 2)


@pytest.fixture
def cat() -> IntMatrix:
    return CAT


def _hyperbolic_pool(bound: int = 5) -> list[tuple[int, int, int, int]]:
    from torrec.errors import HyperbolicityError
    from torrec.spectral import validate_hyperbolic

    out = []
    rng = range(-bound, bound + 1)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    try:
                        validate_hyperbolic(IntMatrix.of([[a, b], [c, d]]))
                    except HyperbolicityError:
                        continue
                    out.append((a, b, c, d))
    return out


HYPERBOLIC_POOL = _hyperbolic_pool()
