import random

import pytest

from mlmagma import Params3, Params4, Vector3, Vector4, make_modulus

TEST_PRIMES = (23, 61, 101)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def random_instance(rng, dim=3, primes=TEST_PRIMES):
    """A random (vector, params) pair sharing one modulus."""
    p = rng.choice(primes)
    m = make_modulus(p)
    if dim == 3:
        a = Vector3(*(rng.randrange(p) for _ in range(3)), m)
        ps = Params3(*(rng.randrange(p) for _ in range(5)), m)
    else:
        a = Vector4(*(rng.randrange(p) for _ in range(4)), m)
        ps = Params4(*(rng.randrange(p) for _ in range(9)), m)
    return a, ps
