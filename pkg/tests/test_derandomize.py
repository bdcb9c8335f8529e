import itertools
from fractions import Fraction

import numpy as np
import pytest

from walkcodes.derandomize import (
    agreement_poly,
    degree,
    derandomized_round,
    exponent_for,
    lift_correlation_poly,
    poly_eval,
    poly_mul,
    poly_pow,
    product_expectation,
)
from walkcodes.errors import DegreeTooHigh, PremiseViolated


def test_product_expectation_examples():
    assert product_expectation([0.3, 0.1], {0: Fraction(5, 7)}) == Fraction(5, 7)
    assert product_expectation([0, 0], {0b11: 1}) == 0
    ref = [1, -1, 1, 1]
    assert product_expectation([0] * 4, poly_pow(agreement_poly(ref), 2)) == Fraction(1, 4)
    with pytest.raises(DegreeTooHigh):
        product_expectation([0] * 4, {0b1111: 1}, degree_cap=3)


def test_poly_arithmetic_matches_pointwise():
    p = {0b01: Fraction(1, 2), 0b10: Fraction(-1, 3), 0: 1}
    q = {0b11: 2, 0b01: 1}
    for z in itertools.product([1, -1], repeat=2):
        assert poly_eval(poly_mul(p, q), z) == poly_eval(p, z) * poly_eval(q, z)
    assert degree(poly_pow(p, 3)) == 2


def test_trivial_round():
    omega, history = derandomized_round([0] * 3, {0: 1}, {0: 1}, Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
    assert set(omega.tolist()) <= {1, -1} and all(v == 1 for v in history)


def test_adversarial_premise():
    with pytest.raises(PremiseViolated):
        derandomized_round([0] * 3, {0: Fraction(1, 10)}, {0: 1}, Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
    with pytest.raises(PremiseViolated):
        exponent_for(2, Fraction(1, 4), Fraction(1, 4))


def test_round_on_planted_lift():
    n = 8
    rng = np.random.default_rng(3)
    planted = rng.choice([1, -1], n)
    tuples = np.array([rng.choice(n, 3, replace=False) for _ in range(30)])
    received = np.prod(planted[tuples], axis=1)
    A = lift_correlation_poly(received, tuples)
    B = agreement_poly(planted)
    means = 0.8 * planted
    a, beta, delta = Fraction(1, 2), Fraction(1, 2), Fraction(1, 4)
    omega, history = derandomized_round(means, A, B, a, beta, delta)
    assert poly_eval(A, omega) >= a * (1 - beta)
    assert abs(poly_eval(B, omega)) >= 1 - delta
    assert all(x <= y for x, y in zip(history, history[1:]))
    k = exponent_for(a, beta, delta)
    objective = poly_mul(A, poly_pow(B, 2 * k))
    best = max(poly_eval(objective, z) for z in itertools.product([1, -1], repeat=n))
    assert poly_eval(objective, omega) <= best
    assert poly_eval(objective, omega) >= history[0]
