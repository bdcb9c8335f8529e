import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from conftest import code_of
from walkcodes.errors import BadIndices, BadResidue, TooManyWalks
from walkcodes.f2 import as_word, bias, code_bias, word_str
from walkcodes.graphs import normalized_adjacency, parse_cayley
from walkcodes.lifting import (
    WalkCollection,
    all_splitting_trees,
    balanced_tree,
    build_cascade,
    direct_sum_lift,
    expander_walk_collection,
    left_linear_tree,
    lift_code,
    parity_sampling_measure,
    product_walk_collection,
    split_operator,
    split_sigma2,
    splittability_report,
    swap_operator,
    swap_walk_collection,
    tree_from_text,
    verify_tensor_structure,
)
from walkcodes.rpp import step_operator
from walkcodes.spectra import second_singular_value


def all_pairs(n):
    return WalkCollection(np.array([(i, j) for i in range(n) for j in range(n)]), n)


def test_direct_sum_lift_by_hand():
    W = WalkCollection(np.array([(0, 1), (1, 2), (0, 2)]), 3)
    assert word_str(direct_sum_lift("101", W)) == "110"
    assert word_str(direct_sum_lift("000", W)) == "000"


def test_lift_over_all_pairs_squares_bias():
    assert bias(direct_sum_lift("0001", all_pairs(4))) == Fraction(1, 4)


def test_parity_sampling_measure_examples():
    assert parity_sampling_measure(all_pairs(4), Fraction(1, 2)) == Fraction(1, 4)
    singletons = WalkCollection(np.arange(4)[:, None], 4)
    assert parity_sampling_measure(singletons, Fraction(1, 2)) == Fraction(1, 2)
    assert parity_sampling_measure(singletons, Fraction(1, 2), words=["0001", "0000"]) == Fraction(1, 2)


def test_expander_walks():
    k4 = parse_cayley("cayley f2^2 1,2,3")
    assert expander_walk_collection(k4, 1).tuples.tolist() == [[0], [1], [2], [3]]
    assert len(expander_walk_collection(k4, 2)) == 12
    with pytest.raises(TooManyWalks):
        expander_walk_collection(k4, 8, cap=100)


def test_expander_walk_bias_bound():
    g = parse_cayley("cayley f2^4 " + ",".join(map(str, range(1, 16))))
    code = code_of("0110100110010110", "0011001111001100")
    eps0 = code_bias(code)
    sigma = second_singular_value(normalized_adjacency(g))
    for t in (3, 4, 5):
        lifted = lift_code(code, expander_walk_collection(g, t))
        assert float(code_bias(lifted)) <= (float(eps0) + 2 * sigma) ** ((t - 1) // 2) + 1e-12


def test_product_walk_parity_sampling(register_product):
    p = register_product
    W = product_walk_collection(p, p.s)
    gamma = max(second_singular_value(step_operator(p, i)) for i in range(p.s))
    eps0 = Fraction(1, 4)
    measured = parity_sampling_measure(W, eps0)
    assert float(measured) <= (float(eps0) + 2 * gamma) ** ((p.s - 1) // 2) + 1e-12


def test_split_operator_entries(k5_c4):
    split = split_operator(k5_c4, 0, 0, 1)
    m = split.matrix()
    assert np.allclose(np.asarray(m.sum(axis=1)).ravel(), 1)
    values = np.unique(m.data)
    assert np.all(values % 0.25 == 0)
    assert second_singular_value(m.toarray()) == pytest.approx(second_singular_value(step_operator(k5_c4, 0)), abs=1e-9)


def test_tensor_structure_and_corruption(register_product):
    split = split_operator(register_product, 0, 1, 2)
    assert verify_tensor_structure(split)
    counts = split.counts.tolil()
    r, c = split.counts.nonzero()
    counts[r[0], c[0]] += 1
    broken = dataclasses.replace(split, counts=counts.tocsr())
    assert not verify_tensor_structure(broken)


def test_split_sigma_equals_step_sigma(register_product):
    p = register_product
    for node in [(0, 0, 1), (0, 1, 2), (1, 1, 3)]:
        assert split_sigma2(split_operator(p, *node)) == pytest.approx(
            second_singular_value(step_operator(p, node[1] % p.s)), abs=1e-9)


def test_swap_operator(tiny_product):
    p = tiny_product
    with pytest.raises(BadResidue):
        swap_operator(p, p.s)
    s_r = swap_operator(p, p.s - 1)
    assert (s_r.k1, s_r.k2, s_r.k3) == (0, 1, 3)
    sg = second_singular_value(normalized_adjacency(p.outer))
    sh = second_singular_value(normalized_adjacency(p.inner))
    assert split_sigma2(s_r) <= sg + 2 * sh + sh ** 2 + 1e-9
    coll = swap_walk_collection(p, 1, 3)
    assert coll.arity == 3 and coll.n == len(product_walk_collection(p, 2))


def test_splittability_base_case_and_bound(register_product):
    single = WalkCollection(np.arange(5)[:, None], 5)
    assert splittability_report(single)["tau"] == 0
    p = register_product
    W = product_walk_collection(p, 3)
    sg = second_singular_value(normalized_adjacency(p.outer))
    sh = second_singular_value(normalized_adjacency(p.inner))
    assert splittability_report(W, balanced_tree(3))["tau"] <= sg + 2 * sh + sh ** 2 + 1e-9


def test_node_values_do_not_depend_on_tree(tiny_product):
    W = product_walk_collection(tiny_product, 4)
    seen = {}
    for tree in all_splitting_trees(4):
        for node, value in splittability_report(W, tree)["nodes"].items():
            seen.setdefault(node, value)
            assert value == pytest.approx(seen[node], abs=1e-12)
    assert len(seen) == 10


def test_tree_helpers():
    tree = tree_from_text("(0,1,3 (0,0,1 0 1) (2,2,3 2 3))")
    assert tree == balanced_tree(4)
    assert list(left_linear_tree(3).internal_nodes()) == [(0, 1, 2), (0, 0, 1)]
    assert sum(1 for _ in all_splitting_trees(4)) == 5
    with pytest.raises(BadIndices):
        tree_from_text("(0,2,3 (0,0,1 0 1) (2,2,3 2 3))")


def test_generic_collection_split_matrix():
    report = splittability_report(all_pairs(3))
    assert report["tau"] == pytest.approx(0, abs=1e-12)


def test_single_level_cascade(tiny_product):
    base = code_of("110", "011")
    cascade = build_cascade(base, tiny_product, 1, tiny_product.s)
    direct = lift_code(base, product_walk_collection(tiny_product, tiny_product.s))
    assert np.array_equal(cascade.code(1).generator, direct.generator)


def test_two_level_cascade_xors_four_base_bits(tiny_product):
    base = code_of("110", "011")
    cascade = build_cascade(base, tiny_product, 2, 2)
    positions = cascade.positions(2)
    assert positions.shape[1] == 4
    for msg in ([1, 0], [0, 1], [1, 1]):
        z = base.encode(msg)
        assert np.array_equal(cascade.encode(msg), np.bitwise_xor.reduce(z[positions], axis=1))
    direct = product_walk_collection(tiny_product, 4)
    assert np.array_equal(cascade.code(2).generator, lift_code(base, direct).generator)
