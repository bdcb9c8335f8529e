import io
from fractions import Fraction

import numpy as np
import pytest

from walkcodes.errors import NotClosedUnderInverse, NotPowerOfTwo, PreconditionError
from walkcodes.graphs import (
    RotationGraph,
    aghp_generators,
    cayley_graph,
    local_invertibility_check,
    normalized_adjacency,
    parse_cayley,
    parse_graph_spec,
    read_graph,
    verify_small_bias,
    write_graph,
)
from walkcodes.spectra import second_singular_value


def test_k5_labeling():
    g = parse_cayley("cayley z5 1,4,2,3")
    assert g.n == 5 and g.degree == 4
    # labels 0..3 carry generators 1,4,2,3; the inverse of 1 is 4, of 2 is 3
    assert local_invertibility_check(g).tolist() == [1, 0, 3, 2]


def test_cycle_and_k4():
    c4 = cayley_graph("z", 4, [1, 3])
    assert local_invertibility_check(c4).tolist() == [1, 0]
    k4 = cayley_graph("f2", 2, [1, 2, 3])
    assert local_invertibility_check(k4).tolist() == [0, 1, 2]
    a = normalized_adjacency(k4)
    assert np.allclose(a, (np.ones((4, 4)) - np.eye(4)) / 3)
    assert second_singular_value(normalized_adjacency(c4)) == pytest.approx(1)


def test_rot_is_involution():
    g = parse_cayley("cayley z7 1,6,3,4")
    for v in range(g.n):
        for j in range(g.degree):
            w, k = g.rot(v, j)
            assert g.rot(w, k) == (v, j)


def test_not_locally_invertible():
    # label 0 is a loop at vertex 0 but the edge label at vertex 1, so the back label depends on v
    neighbor = np.array([[0, 1], [0, 1]])
    back = np.array([[0, 0], [1, 1]])
    g = RotationGraph(neighbor, back)
    assert local_invertibility_check(g) is None


def test_generators_not_closed_under_inverse():
    with pytest.raises(NotClosedUnderInverse):
        cayley_graph("z", 5, [1, 2])


@pytest.mark.parametrize("m, beta, size", [(4, Fraction(1, 2), 64), (2, Fraction(1), 4), (8, Fraction(1, 4), 1024)])
def test_aghp_sizes_and_bias(m, beta, size):
    biased = aghp_generators(m, beta)
    assert len(biased.generators) == size
    assert verify_small_bias(m, biased.generators) <= beta


def test_aghp_rejects_non_power_of_two():
    with pytest.raises(NotPowerOfTwo):
        aghp_generators(4, Fraction(1, 3))


def test_small_bias_examples():
    assert verify_small_bias(3, range(8)) == 0
    assert verify_small_bias(2, [0]) == 1
    assert verify_small_bias(2, [0, 1, 2, 3]) == 0


def test_aghp_graph_spectrum():
    g = parse_graph_spec("aghp 4 1/2")
    assert second_singular_value(normalized_adjacency(g)) <= 0.5 + 1e-9


def test_graph_file_round_trip():
    g = parse_cayley("cayley z6 1,5,3")
    buf = io.StringIO()
    write_graph(g, buf)
    buf.seek(0)
    h = read_graph(buf)
    assert np.array_equal(h.neighbor, g.neighbor) and np.array_equal(h.back_label, g.back_label)
    assert read_graph(io.StringIO("cayley f2^2 01,10,11\n")).n == 4


def test_bad_shorthand():
    with pytest.raises(PreconditionError):
        parse_cayley("cayley q5 1,2")
    with pytest.raises(PreconditionError):
        read_graph(io.StringIO("graph 2 1\n0 0 1 0\n"))
