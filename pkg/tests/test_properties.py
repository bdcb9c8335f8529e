"""Property-based checks of algebraic identities the library relies on."""
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from walkcodes.decode import is_cover, zeta_cover_prune
from walkcodes.derandomize import poly_eval, poly_mul
from walkcodes.ensembles import within_list_radius
from walkcodes.f2 import LinearCode, bias, gf2_rank, message_of, relative_distance, walsh_hadamard
from walkcodes.graphs import parse_cayley
from walkcodes.lifting import WalkCollection, direct_sum_lift, product_walk_collection
from walkcodes.rpp import WideReplacementProduct, exact_lift_bias, rot_i

words = st.integers(1, 24).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n))


def as_array(bits):
    return np.array(bits, dtype=np.uint8)


@given(words)
def test_bias_in_unit_interval_and_complement_invariant(bits):
    w = as_array(bits)
    assert 0 <= bias(w) <= 1
    assert bias(w) == bias(w ^ 1)


@given(st.integers(1, 16).flatmap(lambda n: st.tuples(*[st.lists(st.integers(0, 1), min_size=n, max_size=n)] * 3)))
def test_distance_is_a_metric(triple):
    a, b, c = map(as_array, triple)
    assert relative_distance(a, b) == relative_distance(b, a)
    assert relative_distance(a, c) <= relative_distance(a, b) + relative_distance(b, c)


@given(st.integers(2, 8), st.integers(1, 6), st.data())
def test_lift_is_linear(n, arity, data):
    tuples = data.draw(st.lists(st.lists(st.integers(0, n - 1), min_size=arity, max_size=arity),
                                min_size=1, max_size=20))
    W = WalkCollection(np.array(tuples), n)
    a = as_array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    b = as_array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    assert np.array_equal(direct_sum_lift(a ^ b, W), direct_sum_lift(a, W) ^ direct_sum_lift(b, W))


@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_rank_is_transpose_invariant(rows, seed):
    m = np.random.default_rng(seed).integers(0, 2, (rows, 7), dtype=np.uint8)
    assert gf2_rank(m) == gf2_rank(m.T) <= min(rows, 7)


@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_message_recovery(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.integers(0, 2, (dim, 12), dtype=np.uint8)
    if gf2_rank(g) < dim:
        return
    code = LinearCode(g)
    msg = rng.integers(0, 2, dim, dtype=np.uint8)
    assert np.array_equal(message_of(code, code.encode(msg)), msg)


@given(st.integers(0, 5), st.integers(0, 2 ** 32 - 1))
def test_walsh_hadamard_is_an_involution_up_to_scale(log_n, seed):
    x = np.random.default_rng(seed).integers(-5, 6, 1 << log_n)
    assert np.array_equal(walsh_hadamard(walsh_hadamard(x)), x << log_n)


@given(st.fractions(0, Fraction(1, 2)), st.fractions(Fraction(1, 10 ** 6), Fraction(1, 4)))
def test_list_radius_is_monotone(distance, eta):
    if within_list_radius(distance, eta):
        assert within_list_radius(distance / 2, eta)
        assert within_list_radius(distance, eta / 2)


@settings(max_examples=40)
@given(st.integers(2, 30), st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_prune_gives_independent_cover(n, count, seed):
    rng = np.random.default_rng(seed)
    entries = [(w, w) for w in rng.integers(0, 2, (count, n), dtype=np.uint8)]
    zeta = Fraction(1, 5)
    kept = zeta_cover_prune(entries, zeta).words()
    assert is_cover(kept, [w for w, _ in entries], zeta)
    for i, a in enumerate(kept):
        for b in kept[i + 1:]:
            assert bias(a ^ b) <= 1 - 2 * zeta


masks = st.integers(0, 15)
polys = st.dictionaries(masks, st.fractions(-3, 3, max_denominator=7), max_size=5)


@given(polys, polys, st.lists(st.sampled_from([1, -1]), min_size=4, max_size=4))
def test_polynomial_product_is_pointwise(p, q, z):
    assert poly_eval(poly_mul(p, q), z) == poly_eval(p, z) * poly_eval(q, z)


PRODUCT = WideReplacementProduct(parse_cayley("cayley z6 1,5"), parse_cayley("cayley f2^2 1,2,3"), 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5), st.integers(0, 3), st.integers(0, 1))
def test_rot_is_an_involution(v, h, i):
    assert rot_i(PRODUCT, i, *rot_i(PRODUCT, i, v, h)) == (v, h)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=6, max_size=6), st.integers(1, 4))
def test_operator_bias_matches_enumeration(bits, t):
    z = as_array(bits)
    lifted = direct_sum_lift(z, product_walk_collection(PRODUCT, t))
    assert abs(exact_lift_bias(PRODUCT, z, t) - float(bias(lifted))) <= 1e-10
