"""Plain-text formats for codes, words and tuple collections."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import PreconditionError
from .f2 import LinearCode, as_word, random_balanced_code, word_str
from .graphs import RotationGraph, parse_graph_spec, read_graph
from .lifting import Cascade, WalkCollection, build_cascade
from .rpp import WALK_CAP, WideReplacementProduct


def write_code(code: LinearCode, stream) -> None:
    stream.write(f"code {code.dimension} {code.block_length}\n")
    for row in code.generator:
        stream.write(word_str(row) + "\n")


def read_code(stream) -> LinearCode:
    header = stream.readline().split()
    if len(header) != 3 or header[0] != "code":
        raise PreconditionError("code file must start with 'code <dim> <len>'")
    dim, length = int(header[1]), int(header[2])
    rows = [as_word(line) for line in stream if line.strip()]
    if len(rows) != dim or any(r.size != length for r in rows):
        raise PreconditionError(f"expected {dim} rows of length {length}")
    return LinearCode(np.stack(rows))


def write_words(words, stream) -> None:
    for w in words:
        stream.write(word_str(w) + "\n")


def read_words(stream) -> list[np.ndarray]:
    return [as_word(line) for line in stream if line.strip()]


def write_collection(W: WalkCollection, stream) -> None:
    stream.write(f"walks {W.arity} {W.n}\n")
    np.savetxt(stream, W.tuples, fmt="%d")


def read_collection(stream) -> WalkCollection:
    header = stream.readline().split()
    if len(header) != 3 or header[0] != "walks":
        raise PreconditionError("collection file must start with 'walks <k> <n>'")
    k, n = int(header[1]), int(header[2])
    tuples = np.loadtxt(stream, dtype=np.int64, ndmin=2)
    if tuples.shape[1] != k:
        raise PreconditionError(f"expected tuples of arity {k}")
    return WalkCollection(tuples, n, "explicit")


# ----------------------------------------------------------------------------
# Cascade directories
# ----------------------------------------------------------------------------

def graph_from_config(value, root: Path | None = None) -> RotationGraph:
    """A graph given as a shorthand string or as ``{"file": path}``."""
    if isinstance(value, str):
        return parse_graph_spec(value)
    if isinstance(value, dict) and "file" in value:
        path = Path(value["file"])
        if root is not None and not path.is_absolute():
            path = root / path
        with open(path) as fh:
            return read_graph(fh)
    raise PreconditionError(f"cannot read a graph from {value!r}")


def product_from_config(config: dict, root: Path | None = None) -> WideReplacementProduct:
    for key in ("outer", "inner", "s"):
        if key not in config:
            raise PreconditionError(f"product config is missing {key!r}")
    return WideReplacementProduct(graph_from_config(config["outer"], root),
                                  graph_from_config(config["inner"], root), int(config["s"]))


def base_code_from_config(config: dict, length: int, seed: int, root: Path | None = None) -> LinearCode:
    entry = config.get("base")
    if entry is None:
        raise PreconditionError("config is missing 'base'")
    if "rows" in entry:
        return LinearCode(np.stack([as_word(r) for r in entry["rows"]]))
    if "file" in entry:
        path = Path(entry["file"])
        if root is not None and not path.is_absolute():
            path = root / path
        with open(path) as fh:
            return read_code(fh)
    if "random" in entry:
        r = entry["random"]
        return random_balanced_code(int(r["dim"]), length, Fraction(str(r.get("eps0", "1/4"))),
                                    int(r.get("seed", seed)))
    raise PreconditionError("base must give 'rows', 'file' or 'random'")


def load_cascade(directory, cap: int = WALK_CAP) -> Cascade:
    """Rebuild a cascade from the files a ``build`` run left in ``directory``."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise PreconditionError(f"{directory} has no manifest.json")
    config = json.loads(manifest_path.read_text())["config"]
    with open(directory / "outer.graph") as fh:
        outer = read_graph(fh)
    with open(directory / "inner.graph") as fh:
        inner = read_graph(fh)
    with open(directory / "base.code") as fh:
        base = read_code(fh)
    product = WideReplacementProduct(outer, inner, int(config["s"]))
    levels = int(config.get("levels", 1))
    return build_cascade(base, product, levels, int(config.get("top_arity", config["s"])), cap)
