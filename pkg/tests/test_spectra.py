import io

import numpy as np
import pytest

from walkcodes.ensembles import LocalEnsemble, point_mass, product_ensemble
from walkcodes.errors import MissingMarginal, TooLarge
from walkcodes.spectra import (
    entropy_potential,
    is_row_stochastic,
    kronecker,
    operator_norm,
    read_operator,
    second_singular_value,
    singular_values,
    write_operator,
)


def test_second_singular_value_examples():
    k4 = (np.ones((4, 4)) - np.eye(4)) / 3
    assert second_singular_value(k4) == pytest.approx(1 / 3)
    assert second_singular_value(np.ones((5, 5)) / 5) == pytest.approx(0, abs=1e-12)
    assert second_singular_value(np.eye(4)) == pytest.approx(1)


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == pytest.approx(1)
    assert operator_norm(np.zeros((3, 3))) == 0
    assert operator_norm(np.diag([-1.0, 1.0])) == pytest.approx(1)


def test_kronecker():
    assert np.array_equal(kronecker(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kronecker(np.ones((2, 2)) / 2, np.ones((2, 2)) / 2), np.ones((4, 4)) / 4)
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 5))
    assert second_singular_value(kronecker(a, np.ones((3, 3)) / 3)) == pytest.approx(second_singular_value(a))


def test_power_iteration_matches_dense():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((40, 60))
    dense = np.linalg.svd(a, compute_uv=False)[:3]
    assert np.allclose(singular_values(a, 3), dense)


def test_cap_applies_to_smaller_side():
    wide = np.zeros((2, 50))
    wide[0, 0] = wide[1, 1] = 1
    assert singular_values(wide, 2, cap=4).tolist() == pytest.approx([1, 1])
    with pytest.raises(TooLarge):
        second_singular_value(np.eye(10), cap=4)


def test_row_stochastic():
    assert is_row_stochastic(np.ones((3, 3)) / 3)
    assert not is_row_stochastic(np.eye(3) * 0.5)


def test_entropy_potential_examples():
    assert entropy_potential(point_mass("0110")) == 0
    assert entropy_potential(product_ensemble([0.5] * 3)) == pytest.approx(1)
    one_uniform = LocalEnsemble([[0, 1, 0, 0], [1, 1, 0, 0]], [0.5, 0.5])
    assert entropy_potential(one_uniform) == pytest.approx(0.25)
    with pytest.raises(MissingMarginal):
        entropy_potential(one_uniform, {7: 1.0})


def test_operator_dump_round_trip():
    a = np.arange(6, dtype=float).reshape(2, 3) / 7
    buf = io.StringIO()
    write_operator(a, buf)
    buf.seek(0)
    assert buf.getvalue().startswith("op 2 3\n")
    assert np.array_equal(read_operator(buf), a)
