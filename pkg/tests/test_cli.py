import json

import numpy as np
import pytest

from walkcodes.acceptance import load_fixtures
from walkcodes.cli import main, parse_log2_inv_eps
from walkcodes.io import load_cascade

SMALL = {"outer": "cayley z5 1,4,2,3", "inner": "cayley f2^4 1,2,4,8,15", "s": 2, "levels": 1,
         "base": {"random": {"dim": 2, "eps0": "3/5"}}}
DECODABLE = {"outer": "cayley f2^4 6,3,2,7", "inner": "cayley f2^4 6,9,3", "s": 2, "levels": 2,
             "top_arity": 2,
             "base": {"rows": ["0111101101100010", "0001001011110011", "0111011010001001"]}}


def write_config(tmp_path, config, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


@pytest.fixture(scope="module")
def decodable(tmp_path_factory):
    root = tmp_path_factory.mktemp("cascade")
    assert main(["build", "--config", write_config(root, DECODABLE), "--out", str(root / "c")]) == 0
    return root / "c"


def test_parse_eps():
    assert parse_log2_inv_eps("2^-1000") == 1000
    assert parse_log2_inv_eps("2^-(1e6)") == 10 ** 6
    assert parse_log2_inv_eps("0.25") == 2


def test_build_minimal(tmp_path, capsys):
    out = tmp_path / "c"
    assert main(["build", "--config", write_config(tmp_path, SMALL), "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"base.code", "outer.graph", "inner.graph", "level1.walks", "level1.positions",
            "level1.code", "certificates.json", "manifest.json"} <= names
    assert "level2.walks" not in names
    cert = json.loads((out / "certificates.json").read_text())
    assert len(cert["levels"]) == 1 and "parity_sampling" in cert
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"] == SMALL and set(manifest["files"]) == names - {"manifest.json"}


def test_build_is_deterministic(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    for name in ("a", "b"):
        assert main(["build", "--config", cfg, "--out", str(tmp_path / name), "--seed", "7"]) == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_build_walk_cap(tmp_path, capsys):
    code = main(["build", "--config", write_config(tmp_path, SMALL), "--out", str(tmp_path / "c"),
                 "--cap-walks", "100"])
    assert code == 2
    assert "TooManyWalks" in capsys.readouterr().err


def test_encode_zero_and_basis(decodable, capsys):
    cascade = load_cascade(decodable)
    assert main(["encode", "--cascade", str(decodable), "--message", "000"]) == 0
    assert set(capsys.readouterr().out.strip()) == {"0"}
    for i, msg in enumerate(["100", "010", "001"]):
        assert main(["encode", "--cascade", str(decodable), "--message", msg]) == 0
        word = np.frombuffer(capsys.readouterr().out.strip().encode(), np.uint8) - ord("0")
        assert np.array_equal(word, cascade.code(2).generator[i])


def test_encode_length_mismatch(decodable, capsys):
    assert main(["encode", "--cascade", str(decodable), "--message", "10"]) == 2
    assert "LengthMismatch" in capsys.readouterr().err


@pytest.mark.parametrize("mode", ["unique", "fixedpoly", "list"])
def test_round_trip(decodable, tmp_path, capsys, mode):
    assert main(["encode", "--cascade", str(decodable), "--message", "101", "--out", str(tmp_path)]) == 0
    word = (tmp_path / "codeword.txt").read_text().strip()
    rng = np.random.default_rng(0)
    bits = np.frombuffer(word.encode(), np.uint8) - ord("0")
    bits[rng.choice(bits.size, bits.size // 8, replace=False)] ^= 1
    (tmp_path / "noisy.txt").write_text("".join(map(str, bits)) + "\n")
    out = tmp_path / "decoded"
    assert main(["decode", "--cascade", str(decodable), "--word", str(tmp_path / "noisy.txt"),
                 "--mode", mode, "--out", str(out)]) == 0
    assert (out / "decoded.txt").read_text().split() == ["101"]
    trace = [json.loads(line) for line in (out / "trace.jsonl").read_text().splitlines()]
    assert trace and all(entry["mode"] == mode for entry in trace)


def test_decode_failure_exit_code(decodable, tmp_path, capsys):
    n = load_cascade(decodable).ground_size(2)
    rng = np.random.default_rng(1)
    (tmp_path / "w.txt").write_text("".join(map(str, rng.integers(0, 2, n))) + "\n")
    assert main(["decode", "--cascade", str(decodable), "--word", str(tmp_path / "w.txt")]) == 3


def test_params_report(capsys):
    assert main(["params", "--dim", "64", "--eps", "2^-1e12", "--round", "I", "--alpha", "1/128"]) == 0
    lines = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert {"log2_N", "rate_exponent_bound", "gate_alpha_feasible", "rate_certified"} <= set(lines)
    assert lines["rate_certified"] == "True"


def test_params_infeasible(capsys):
    assert main(["params", "--eps", "2^-1000", "--round", "I", "--alpha", "1/128"]) == 2
    assert "Infeasible" in capsys.readouterr().err


def test_spectra_and_parity(tmp_path, capsys):
    product = write_config(tmp_path, {"outer": "cayley f2^3 1,2,4,7", "inner": "cayley f2^4 3,5,9,15", "s": 2})
    assert main(["spectra", "--product", product, "--check", "zigzag"]) == 0
    assert "zigzag=pass" in capsys.readouterr().out
    assert main(["spectra", "--product", product, "--check", "thm35", "--trials", "10"]) == 0
    assert "agreed=10" in capsys.readouterr().out
    assert main(["parity-sampler", "--product", product, "--t", "2", "--eps0", "1/4", "--bound", "1"]) == 0
    assert "certified=True" in capsys.readouterr().out


def test_certify_splittability(tmp_path, capsys):
    (tmp_path / "w.txt").write_text("walks 2 3\n0 1\n1 2\n2 0\n1 0\n2 1\n0 2\n")
    assert main(["certify-splittability", "--collection", str(tmp_path / "w.txt"), "--threshold", "1"]) == 0
    assert "tau=" in capsys.readouterr().out
    (tmp_path / "tree.txt").write_text("(0,0,2 0 (1,1,2 1 2))")
    (tmp_path / "w3.txt").write_text("walks 3 2\n0 1 0\n1 0 1\n")
    assert main(["certify-splittability", "--collection", str(tmp_path / "w3.txt"),
                 "--tree", f"explicit:{tmp_path / 'tree.txt'}", "--threshold", "1/2"]) == 3


def test_cover_prune(tmp_path, capsys):
    (tmp_path / "list.txt").write_text("0000\n0000\n1111\n0101\n")
    (tmp_path / "true.txt").write_text("0000\n0101\n")
    assert main(["cover-prune", "--list", str(tmp_path / "list.txt"), "--zeta", "1/8",
                 "--true", str(tmp_path / "true.txt")]) == 0
    assert capsys.readouterr().out.split() == ["0000", "0101"]


def test_selftest_filter(capsys):
    assert main(["selftest", "--filter", "graphs"]) == 0
    out = capsys.readouterr().out
    assert "criterion 11" in out and "1/1 criteria passed" in out


def test_selftest_corrupted_fixture(tmp_path, capsys):
    fixtures = load_fixtures()
    fixtures["aghp"]["cases"][0]["size"] = 63
    path = write_config(tmp_path, fixtures, "fixtures.json")
    assert main(["selftest", "--filter", "11", "--fixtures", path]) == 3
    assert "failed: criterion 11 AGHP certification" in capsys.readouterr().out
