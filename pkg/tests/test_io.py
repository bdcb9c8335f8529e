import io
import json

import numpy as np
import pytest

from conftest import code_of
from walkcodes.errors import PreconditionError
from walkcodes.io import (
    base_code_from_config,
    graph_from_config,
    product_from_config,
    read_code,
    read_collection,
    read_words,
    write_code,
    write_collection,
    write_words,
)
from walkcodes.lifting import WalkCollection


def test_code_round_trip():
    code = code_of("0110", "0011")
    buf = io.StringIO()
    write_code(code, buf)
    assert buf.getvalue() == "code 2 4\n0110\n0011\n"
    buf.seek(0)
    assert np.array_equal(read_code(buf).generator, code.generator)


def test_code_header_checked():
    with pytest.raises(PreconditionError):
        read_code(io.StringIO("code 2 4\n0110\n"))
    with pytest.raises(PreconditionError):
        read_code(io.StringIO("matrix 1 2\n01\n"))


def test_words_round_trip():
    buf = io.StringIO()
    write_words([np.array([1, 0, 1], np.uint8), np.array([0, 0, 1], np.uint8)], buf)
    buf.seek(0)
    assert [w.tolist() for w in read_words(buf)] == [[1, 0, 1], [0, 0, 1]]


def test_collection_round_trip():
    coll = WalkCollection(np.array([[0, 2, 1], [3, 3, 0]]), 4)
    buf = io.StringIO()
    write_collection(coll, buf)
    buf.seek(0)
    back = read_collection(buf)
    assert back.n == 4 and np.array_equal(back.tuples, coll.tuples)


def test_configs(tmp_path):
    (tmp_path / "g.graph").write_text("cayley z4 1,3\n")
    assert graph_from_config({"file": "g.graph"}, tmp_path).n == 4
    p = product_from_config({"outer": "cayley z4 1,3", "inner": "cayley f2^2 1,2", "s": 2})
    assert p.n_vertices == 16
    code = base_code_from_config({"base": {"random": {"dim": 2, "eps0": "1/2", "seed": 3}}}, 4, 0)
    assert code.block_length == 4
    with pytest.raises(PreconditionError):
        product_from_config({"outer": "cayley z4 1,3"})
    with pytest.raises(PreconditionError):
        base_code_from_config({"base": {}}, 4, 0)
