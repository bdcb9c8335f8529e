"""Derandomized rounding by the method of conditional expectations.

Functions on {+1,-1}^n are multilinear polynomials stored as ``{mask: coeff}``,
where bit i of ``mask`` marks variable z_i.  Because z_i^2 = 1, multiplying two
monomials XORs their masks.  A product distribution is given by its vector of
means E[z_i].
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DegreeTooHigh, PremiseViolated

DEGREE_CAP = 24


def poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            m = ma ^ mb
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def poly_pow(p: dict, e: int) -> dict:
    result = {0: 1}
    base = p
    while e:
        if e & 1:
            result = poly_mul(result, base)
        base = poly_mul(base, base)
        e >>= 1
    return result


def poly_eval(p: dict, z) -> Fraction | float:
    """Value at a point z in {+1,-1}^n."""
    z = np.asarray(z)
    neg = sum(1 << i for i, v in enumerate(z) if v < 0)
    return sum(c * (-1 if bin(m & neg).count("1") & 1 else 1) for m, c in p.items())


def degree(p: dict) -> int:
    return max((bin(m).count("1") for m in p), default=0)


def product_expectation(means, poly: dict, degree_cap: int = DEGREE_CAP):
    """sum_T alpha_T prod_{i in T} E[z_i]."""
    if degree(poly) > degree_cap:
        raise DegreeTooHigh(f"degree {degree(poly)} exceeds the cap {degree_cap}")
    means = list(means)
    total = 0
    for mask, coeff in poly.items():
        term = coeff
        i = 0
        while mask:
            if mask & 1:
                term = term * means[i]
            mask >>= 1
            i += 1
        total += term
    return total


def exponent_for(a, beta, delta) -> int:
    """Smallest k with exp(-2 k delta) < a (1 - beta), plus one for slack."""
    target = float(a) * (1 - float(beta))
    if not 0 < target < 1:
        raise PremiseViolated("need 0 < a(1 - beta) < 1")
    return math.ceil(math.log(1 / target) / (2 * float(delta))) + 1


def derandomized_round(means, A: dict, B: dict, a, beta, delta,
                       degree_cap: int = DEGREE_CAP) -> tuple[np.ndarray, list]:
    """Fix coordinates one at a time to keep E[A * B^(2k)] from decreasing.

    Returns (omega, history) where history lists the conditional expectation
    before the first and after each fixed coordinate.
    """
    k = exponent_for(a, beta, delta)
    target = Fraction(a) * (1 - Fraction(beta))
    objective = poly_mul(A, poly_pow(B, 2 * k))
    current = list(means)
    value = product_expectation(current, objective, degree_cap)
    history = [value]
    if value < target:
        raise PremiseViolated(f"initial expectation {float(value):.6g} is below a(1 - beta) = {float(target):.6g}")
    for i in range(len(current)):
        plus = current[:i] + [1] + current[i + 1:]
        minus = current[:i] + [-1] + current[i + 1:]
        e_plus = product_expectation(plus, objective, degree_cap)
        e_minus = product_expectation(minus, objective, degree_cap)
        current, value = (plus, e_plus) if e_plus >= e_minus else (minus, e_minus)
        if value < target:
            raise PremiseViolated(f"conditional expectation fell to {float(value):.6g} at coordinate {i}")
        history.append(value)
    return np.array(current, dtype=int), history


def lift_correlation_poly(received_signs, tuples) -> dict:
    """A(z) = E_w received_w * prod_{i in w} z_i, as a multilinear polynomial."""
    tuples = np.asarray(tuples)
    out: dict = {}
    weight = Fraction(1, len(tuples))
    for sign, row in zip(received_signs, tuples):
        mask = 0
        for i in row:
            mask ^= 1 << int(i)
        out[mask] = out.get(mask, 0) + int(sign) * weight
    return {m: c for m, c in out.items() if c != 0}


def agreement_poly(reference_signs) -> dict:
    """z -> E_i ref_i z_i (degree one)."""
    n = len(reference_signs)
    return {1 << i: Fraction(int(s), n) for i, s in enumerate(reference_signs)}
