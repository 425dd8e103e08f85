import random

import pytest

from deeplocus.field import FieldContext, FieldValue, QI, QQ, prime_field

F2 = prime_field(2)
F3 = prime_field(3)
F5 = prime_field(5)
F7 = prime_field(7)


def random_value(ctx: FieldContext, rng: random.Random, nonzero: bool = False) -> FieldValue:
    """Draw a small random element of ctx, reproducibly."""
    while True:
        if ctx.kind == "prime-field":
            v = ctx.from_int(rng.randrange(ctx.p))
        elif ctx.kind == "rationals":
            v = ctx.rational(rng.randint(-6, 6), rng.randint(1, 5))
        else:
            v = ctx.gaussian(rng.randint(-4, 4), rng.randint(-4, 4))
        if not nonzero or not v.is_zero:
            return v


@pytest.fixture
def rng():
    return random.Random(20240817)
