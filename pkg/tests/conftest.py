import math

import numpy as np
import pytest

from ifslocus import Family, Parameter, classify, lens_test


def make_param(c: complex, n: int) -> Parameter:
    return Parameter.from_complex(c, n)


def sample_lens(n: int, rng: np.random.Generator, count: int) -> list[Parameter]:
    """Uniform rejection samples from the lens, off the real axis and unit disk."""
    out: list[Parameter] = []
    bound = math.sqrt(2 * n)
    while len(out) < count:
        xs = rng.uniform(-bound, bound, size=4 * count)
        ys = rng.uniform(-bound, bound, size=4 * count)
        for x, y in zip(xs, ys):
            if y == 0.0 or x * x + y * y <= 1.0:
                continue
            p = Parameter(float(x), float(y), Family(n))
            if lens_test(p).in_lens:
                out.append(p)
                if len(out) == count:
                    break
    return out


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    # a depth >= 1 search triggers the jit compile; keep it out of timed tests
    classify(make_param(0.9 + 1.3j, 3))
