import numpy as np
import pytest

from walkcodes.f2 import LinearCode, as_word
from walkcodes.graphs import parse_cayley
from walkcodes.rpp import WideReplacementProduct


def code_of(*rows) -> LinearCode:
    return LinearCode(np.stack([as_word(r) for r in rows]))


@pytest.fixture
def k5_c4():
    """K5 as Cay(Z5, (1,4,2,3)) with the 4-cycle Cay(Z4, (1,3)) as inner graph, s = 1."""
    return WideReplacementProduct(parse_cayley("cayley z5 1,4,2,3"), parse_cayley("cayley z4 1,3"), 1)


@pytest.fixture
def register_product():
    """d1 = 4, s = 2, inner graph a Cayley graph on F2^4."""
    return WideReplacementProduct(parse_cayley("cayley f2^3 1,2,4,7"),
                                  parse_cayley("cayley f2^4 3,5,9,15"), 2)


@pytest.fixture
def tiny_product():
    return WideReplacementProduct(parse_cayley("cayley z3 1,2"), parse_cayley("cayley f2^2 1,2"), 2)
