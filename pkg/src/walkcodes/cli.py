"""Command-line front end: ``walkcodes <command> [options]``.

Every command takes the global flags ``--seed``, ``--cap-walks``, ``--cap-dim``
and ``--out``.  Exit status is 0 on success, 2 when an input violates a
precondition and 3 when a certificate, bound check or decoding fails.
"""
from __future__ import annotations

import argparse
import hashlib
import io as _io
import json
import math
import re
import sys
import traceback
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, acceptance, params
from .decode import (
    BruteForceBackend,
    DecoderConfig,
    RecursionStats,
    cascade_unique_decode,
    fixed_poly_decode,
    is_cover,
    zeta_cover_prune,
)
from .errors import CertificationError, DecodingFailure, PreconditionError, WalkCodesError
from .f2 import LinearCode, code_bias, message_of, word_str
from .graphs import normalized_adjacency, write_graph
from .io import (
    base_code_from_config,
    graph_from_config,
    load_cascade,
    product_from_config,
    read_collection,
    read_words,
    write_code,
    write_collection,
    write_words,
)
from .lifting import (
    EXHAUSTIVE_LIMIT,
    WalkCollection,
    balanced_tree,
    expander_walk_collection,
    parity_sampling_measure,
    product_walk_collection,
    splittability_report,
    tree_from_text,
)
from .rpp import (
    WALK_CAP,
    enumerate_walks,
    block_norm_check,
    pseudorandomness_identity_check,
    walk_dump_lines,
    zigzag_spectral_checks,
)
from .spectra import DIM_CAP, second_singular_value

EXIT_OK, EXIT_PRECONDITION, EXIT_CERTIFICATION = 0, 2, 3


# ----------------------------------------------------------------------------
# small helpers
# ----------------------------------------------------------------------------

def parse_log2_inv_eps(text: str) -> float:
    """``2^-1000``, ``2^-(1e6)`` or a plain probability such as ``0.001``; returns x = log2(1/eps)."""
    m = re.fullmatch(r"\s*2\s*\^\s*-\s*\(?\s*([0-9.eE+]+)\s*\)?\s*", text)
    if m:
        x = float(m.group(1))
    else:
        eps = float(Fraction(text))
        if not 0 < eps < 1:
            raise PreconditionError(f"eps = {text} must lie in (0, 1)")
        x = -math.log2(eps)
    if x <= 0:
        raise PreconditionError(f"eps = {text} must be below 1")
    return int(x) if float(x).is_integer() else x


def _fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"not a rational number: {text!r}") from exc


def _format(value) -> str:
    if isinstance(value, (tuple, list)):
        return ";".join(_format(v) for v in value)
    return str(value)


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n"


class Output:
    """Collects a command's text; writes ``<out>/<name>`` when --out is set, stdout otherwise."""

    def __init__(self, args, name: str):
        self.out = Path(args.out) if args.out else None
        self.name = name
        self.buffer = _io.StringIO()

    def write(self, text: str) -> None:
        self.buffer.write(text)

    def line(self, text: str = "") -> None:
        self.buffer.write(text + "\n")

    def close(self) -> None:
        text = self.buffer.getvalue()
        if self.out is None:
            sys.stdout.write(text)
        else:
            self.out.mkdir(parents=True, exist_ok=True)
            (self.out / self.name).write_text(text)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise PreconditionError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path} is not valid JSON: {exc}") from exc


def _read_word_file(path) -> list[np.ndarray]:
    try:
        with open(path) as fh:
            return read_words(fh)
    except FileNotFoundError as exc:
        raise PreconditionError(f"no such file: {path}") from exc


# ----------------------------------------------------------------------------
# params
# ----------------------------------------------------------------------------

def cmd_params(args) -> int:
    x = parse_log2_inv_eps(args.eps)
    out = Output(args, "params.txt")
    alpha = _fraction(args.alpha) if args.alpha else None
    if args.round in ("I", "II") and alpha is None:
        raise PreconditionError(f"round {args.round} needs --alpha")
    status = EXIT_OK
    width = args.s
    if args.round == "I":
        p = params.gamma(args.dim, x, alpha, args.Q, args.mode)
        report = p.report()
        rate = params.rate_report(p)
        report.update({f"rate_{k}": v for k, v in rate["checks"].items()})
        report["rate_certified"] = rate["ok"]
        if not rate["ok"]:
            status = EXIT_CERTIFICATION
    elif args.round == "II":
        report = params.round_two(args.dim, x, alpha, args.mode).report()
    elif args.round == "III":
        report = params.round_three(args.dim, x, args.c, args.mode).report()
    else:
        width = args.s if args.s else params.width_for(x, args.c)
        if args.mode == "paper" and width < params.PAPER_MIN_S:
            raise params.Infeasible(f"s = {width} is below the paper-mode minimum {params.PAPER_MIN_S}")
        report = params.round_four_radius(width, args.c)
    if args.eta:
        th = params.thresholds(_fraction(args.eta), args.k if args.k else 2, width)
        report.update({f"threshold_{k}": v for k, v in vars(th).items()})
    for key, value in report.items():
        out.line(f"{key}={_format(value)}")
    out.close()
    return status


# ----------------------------------------------------------------------------
# build / encode / decode
# ----------------------------------------------------------------------------

def _certificates(cascade, product, args) -> dict:
    cert: dict = {}
    try:
        cert["sigma_outer"] = second_singular_value(normalized_adjacency(product.outer, args.cap_dim), args.cap_dim)
        cert["sigma_inner"] = second_singular_value(normalized_adjacency(product.inner, args.cap_dim), args.cap_dim)
    except PreconditionError as exc:
        cert["graph_spectra"] = f"skipped: {exc}"
    if product.n_vertices <= args.cap_dim:
        report = zigzag_spectral_checks(product)
        cert["zigzag"] = {"bound": report["bound"], "refined_bound": report["refined_bound"],
                          "sigma_steps": report["sigma_steps"]}
    else:
        cert["zigzag"] = f"skipped: {product.n_vertices} product vertices exceed the dimension cap"
    levels = []
    for i, level in enumerate(cascade.levels, start=1):
        entry = {"level": i, "walks": len(level.collection), "arity": level.collection.arity,
                 "span": level.span, "length": level.code.block_length}
        if level.code.dimension <= 20 and len(level.collection) * (1 << level.code.dimension) <= 1 << 26:
            entry["bias"] = code_bias(level.code)
        try:
            split = splittability_report(level.collection, balanced_tree(level.collection.arity),
                                         cap=args.cap_dim, cap_walks=args.cap_walks) \
                if level.collection.arity > 1 else {"tau": 0.0, "nodes": {}}
            entry["tau"] = split["tau"]
            entry["split_sigma"] = {",".join(map(str, k)): v for k, v in split["nodes"].items()}
        except PreconditionError as exc:
            entry["tau"] = f"skipped: {exc}"
        levels.append(entry)
    cert["levels"] = levels
    base = cascade.base
    cert["base_bias"] = code_bias(base)
    first = cascade.levels[0].collection
    if first.n <= EXHAUSTIVE_LIMIT:
        cert["parity_sampling"] = {"eps0": cert["base_bias"],
                                   "measure": parity_sampling_measure(first, cert["base_bias"])}
    else:
        cert["parity_sampling"] = f"skipped: ground set {first.n} exceeds {EXHAUSTIVE_LIMIT}"
    return cert


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_build(args) -> int:
    from .lifting import build_cascade

    if not args.out:
        raise PreconditionError("build needs --out <dir>")
    config_path = Path(args.config)
    config = _read_json(config_path)
    root = config_path.parent
    product = product_from_config(config, root)
    base = base_code_from_config(config, product.outer.n, args.seed, root)
    levels = int(config.get("levels", 1))
    top_arity = int(config.get("top_arity", product.s))
    cascade = build_cascade(base, product, levels, top_arity, args.cap_walks)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {}

    def emit(name: str, writer) -> None:
        buf = _io.StringIO()
        writer(buf)
        (out / name).write_text(buf.getvalue())
        files[name] = _sha256(out / name)

    emit("base.code", lambda fh: write_code(base, fh))
    for side in ("outer", "inner"):
        value = config[side]
        graph = getattr(product, side)
        if isinstance(value, str):
            emit(f"{side}.graph", lambda fh, v=value: fh.write(v.strip() + "\n"))
        else:
            emit(f"{side}.graph", lambda fh, g=graph: write_graph(g, fh))
    for i, level in enumerate(cascade.levels, start=1):
        emit(f"level{i}.walks", lambda fh, c=level.collection: write_collection(c, fh))
        positions = WalkCollection(cascade.positions(i), base.block_length, "projection")
        emit(f"level{i}.positions", lambda fh, c=positions: write_collection(c, fh))
        emit(f"level{i}.code", lambda fh, c=level.code: write_code(c, fh))
    cert = _certificates(cascade, product, args)
    emit("certificates.json", lambda fh: fh.write(_dumps(cert)))
    manifest = {
        "command": "build",
        "config": config,
        "flags": {"seed": args.seed, "cap_walks": args.cap_walks, "cap_dim": args.cap_dim},
        "version": __version__,
        "files": files,
    }
    (out / "manifest.json").write_text(_dumps(manifest))
    print(f"built {levels}-level cascade: dimension {base.dimension}, "
          f"length {cascade.code(levels).block_length}, files in {out}")
    return EXIT_OK


def _message(args, dim: int) -> np.ndarray:
    text = args.message
    if text.startswith("@"):
        words = _read_word_file(text[1:])
        if len(words) != 1:
            raise PreconditionError("message file must hold exactly one word")
        return words[0]
    if not re.fullmatch(r"[01]+", text):
        raise PreconditionError("message must be a 0/1 string")
    return np.frombuffer(text.encode(), dtype=np.uint8) - ord("0")


def cmd_encode(args) -> int:
    cascade = load_cascade(args.cascade, args.cap_walks)
    message = _message(args, cascade.base.dimension)
    out = Output(args, "codeword.txt")
    out.line(word_str(cascade.encode(message)))
    out.close()
    return EXIT_OK


def _default_radii(cascade, args) -> tuple[Fraction, Fraction]:
    """--eta/--eta0 when given, otherwise the measured top-level and largest lower-level bias."""
    eta = _fraction(args.eta) if args.eta else code_bias(cascade.code(cascade.depth))
    if eta == 0:
        raise PreconditionError("the top code has bias 0; pass a positive --eta")
    if args.eta0:
        eta0 = _fraction(args.eta0)
    else:
        eta0 = max(code_bias(cascade.code(i)) for i in range(cascade.depth))
    return eta, eta0


def cmd_decode(args) -> int:
    cascade = load_cascade(args.cascade, args.cap_walks)
    words = _read_word_file(args.word)
    if len(words) != 1:
        raise PreconditionError("word file must hold exactly one word")
    received = words[0]
    eta, eta0 = _default_radii(cascade, args)
    backend = BruteForceBackend(cascade, seed=args.seed)
    trace: list = []
    out = Output(args, "decoded.txt")
    status = EXIT_OK
    try:
        if args.mode == "list":
            found = backend.decode(cascade.depth, received, eta)
            trace.append({"mode": "list", "level": cascade.depth, "list_size": len(found)})
            top = backend.codewords(cascade.depth)
            for _, lifted in found:
                idx = int(np.nonzero((top == lifted).all(axis=1))[0][0])
                out.line(word_str(message_of(cascade.base, backend.codewords(0)[idx])))
        else:
            config = DecoderConfig(eta0, eta)
            if args.mode == "unique":
                base = cascade_unique_decode(cascade, backend, received, config, trace)
            else:
                stats = RecursionStats()
                base = fixed_poly_decode(cascade, backend, received, config, stats, trace)
                trace.append({"mode": "fixedpoly", "recursion_nodes": stats.nodes})
            out.line(word_str(message_of(cascade.base, base)))
    except DecodingFailure as exc:
        trace.append({"mode": args.mode, "failure": f"{type(exc).__name__}: {exc}"})
        status = EXIT_CERTIFICATION
        print(f"decoding failed: {exc}", file=sys.stderr)
    trace_text = "".join(json.dumps(_jsonable(t), sort_keys=True) + "\n" for t in trace)
    if args.out:
        out.close()
        (Path(args.out) / "trace.jsonl").write_text(trace_text)
    else:
        out.close()
        sys.stderr.write(trace_text)
    return status


# ----------------------------------------------------------------------------
# spectra / certify-splittability / parity-sampler / cover-prune
# ----------------------------------------------------------------------------

def cmd_spectra(args) -> int:
    config = _read_json(args.product)
    product = product_from_config(config, Path(args.product).parent)
    if product.n_vertices > args.cap_dim:
        raise PreconditionError(f"{product.n_vertices} product vertices exceed --cap-dim {args.cap_dim}")
    out = Output(args, "spectra.txt")
    rng = np.random.default_rng(args.seed)
    status = EXIT_OK
    if args.check == "zigzag":
        report = zigzag_spectral_checks(product)
        for key in ("sigma_outer", "sigma_inner", "bound", "refined_bound"):
            out.line(f"{key}={report[key]}")
        for i, value in enumerate(report["sigma_steps"]):
            out.line(f"sigma_step_{i}={value}")
        out.line("zigzag=pass")
    elif args.check == "fact36":
        held = premised = 0
        for trial in range(args.trials):
            z = rng.integers(0, 2, product.outer.n, dtype=np.uint8)
            r = block_norm_check(product, z)
            out.line(f"trial={trial} norm={r['norm']} bound={r['bound']} premise={r['premise']}")
            if r["premise"]:
                premised += 1
                held += r["holds"]
        out.line(f"premise_trials={premised} bound_held={held}")
        if held < premised:
            status = EXIT_CERTIFICATION
    else:
        agree = 0
        for _ in range(args.trials):
            z = rng.integers(0, 2, product.outer.n, dtype=np.uint8)
            v, w = rng.standard_normal(product.outer.n), rng.standard_normal(product.outer.n)
            k1 = int(rng.integers(0, product.s))
            k2 = int(rng.integers(k1, product.s))
            agree += pseudorandomness_identity_check(product, z, k1, k2, v, w)
        out.line(f"trials={args.trials} agreed={agree}")
        if agree < args.trials:
            status = EXIT_CERTIFICATION
    if args.dump_walks is not None:
        space = enumerate_walks(product, 0, args.dump_walks, args.cap_walks)
        for line in walk_dump_lines(space):
            out.line(line)
    out.close()
    return status


def cmd_certify_splittability(args) -> int:
    with open(args.collection) as fh:
        coll = read_collection(fh)
    if args.tree == "balanced":
        tree = balanced_tree(coll.arity)
    elif args.tree.startswith("explicit:"):
        tree = tree_from_text(Path(args.tree[len("explicit:"):]).read_text())
    else:
        raise PreconditionError("--tree must be 'balanced' or 'explicit:<file>'")
    report = splittability_report(coll, tree, cap=args.cap_dim)
    out = Output(args, "splittability.txt")
    for node, value in report["nodes"].items():
        out.line(f"node={','.join(map(str, node))} sigma2={value}")
    out.line(f"tau={report['tau']}")
    status = EXIT_OK
    if args.threshold is not None:
        ok = report["tau"] <= float(_fraction(args.threshold))
        out.line(f"certified={ok}")
        status = EXIT_OK if ok else EXIT_CERTIFICATION
    out.close()
    return status


def cmd_parity_sampler(args) -> int:
    if args.collection:
        with open(args.collection) as fh:
            coll = read_collection(fh)
    elif args.graph:
        coll = expander_walk_collection(graph_from_config(args.graph), args.t, args.cap_walks)
    elif args.product:
        config = _read_json(args.product)
        coll = product_walk_collection(product_from_config(config, Path(args.product).parent),
                                       args.t, args.cap_walks)
    else:
        raise PreconditionError("give --collection, --graph or --product")
    if args.graph or args.product:
        if args.t is None:
            raise PreconditionError("--graph and --product need --t")
    words = _read_word_file(args.words) if args.words else None
    eps0 = _fraction(args.eps0)
    measure = parity_sampling_measure(coll, eps0, words)
    out = Output(args, "parity.txt")
    out.line(f"tuples={len(coll)} arity={coll.arity} n={coll.n}")
    out.line(f"eps0={eps0}")
    out.line(f"measure={measure}")
    out.line(f"measure_float={float(measure)}")
    status = EXIT_OK
    if args.bound is not None:
        ok = measure <= _fraction(args.bound)
        out.line(f"certified={ok}")
        status = EXIT_OK if ok else EXIT_CERTIFICATION
    out.close()
    return status


def cmd_cover_prune(args) -> int:
    words = _read_word_file(args.list)
    zeta = _fraction(args.zeta)
    pruned = zeta_cover_prune([(w, w) for w in words], zeta)
    out = Output(args, "pruned.txt")
    write_words(pruned.words(), out)
    status = EXIT_OK
    if args.true:
        ok = is_cover(pruned.words(), _read_word_file(args.true), 2 * zeta)
        print(f"input={len(words)} pruned={len(pruned)} cover={ok}", file=sys.stderr)
        status = EXIT_OK if ok else EXIT_CERTIFICATION
    out.close()
    return status


# ----------------------------------------------------------------------------
# selftest
# ----------------------------------------------------------------------------

def cmd_selftest(args) -> int:
    fixtures = acceptance.load_fixtures(args.fixtures)
    criteria = acceptance.select(args.filter)
    if not criteria:
        raise PreconditionError(f"no criterion matches {args.filter!r}")
    out = Output(args, "selftest.txt")
    results = []
    for criterion in criteria:
        result = acceptance.run_criterion(criterion, fixtures)
        results.append(result)
        print(result.line(), flush=True)
        out.line(result.line())
    failed = [r for r in results if not r.passed]
    summary = f"{len(results) - len(failed)}/{len(results)} criteria passed"
    if failed:
        summary += "; failed: " + ", ".join(f"criterion {r.number} {r.name}" for r in failed)
    print(summary)
    out.line(summary)
    if args.out:
        out.close()
    return EXIT_CERTIFICATION if failed else EXIT_OK


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--cap-walks", type=int, default=WALK_CAP, help="maximum walks enumerated")
    common.add_argument("--cap-dim", type=int, default=DIM_CAP, help="maximum dense operator side")
    common.add_argument("--out", help="output directory (stdout when omitted)")

    parser = argparse.ArgumentParser(prog="walkcodes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"walkcodes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", parents=[common], help="parameter recipes in log2 domain")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--eps", required=True, help="target bias, e.g. 2^-1000")
    p.add_argument("--round", choices=["I", "II", "III", "IV"], default="I")
    p.add_argument("--alpha", help="1/s with s a power of two, e.g. 1/128")
    p.add_argument("--Q", type=int, default=1)
    p.add_argument("--mode", choices=["paper", "desk"], default="paper")
    p.add_argument("--s", type=int, help="width for round IV (default: derived from eps)")
    p.add_argument("--c", type=float, default=1.0, help="constant in the width and radius recipes")
    p.add_argument("--eta", help="also report decoding thresholds at this eta")
    p.add_argument("--k", type=int, help="walk arity for the thresholds (default 2)")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("build", parents=[common], help="build a cascade directory from a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("encode", parents=[common], help="encode a message through a cascade")
    p.add_argument("--cascade", required=True)
    p.add_argument("--message", required=True, help="0/1 string, or @file")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common], help="decode a received word")
    p.add_argument("--cascade", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--mode", choices=["unique", "fixedpoly", "list"], default="unique")
    p.add_argument("--eta", help="list radius parameter (default: measured top-level bias)")
    p.add_argument("--eta0", help="lower-level bias bound (default: measured)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("spectra", parents=[common], help="spectral checks on a replacement product")
    p.add_argument("--product", required=True, help="JSON file with outer, inner and s")
    p.add_argument("--check", choices=["zigzag", "fact36", "thm35"], default="zigzag")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dump-walks", type=int, metavar="K2", help="also list all walks on times 0..K2")
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("certify-splittability", parents=[common], help="sigma_2 of every split operator")
    p.add_argument("--collection", required=True)
    p.add_argument("--tree", default="balanced", help="balanced or explicit:<file>")
    p.add_argument("--threshold", help="fail (exit 3) when tau exceeds this")
    p.set_defaults(func=cmd_certify_splittability)

    p = sub.add_parser("parity-sampler", parents=[common], help="exhaustive parity-sampling measure")
    p.add_argument("--collection")
    p.add_argument("--graph", help="graph shorthand for plain expander walks")
    p.add_argument("--product", help="JSON product file for first-level product walks")
    p.add_argument("--t", type=int, help="walk length in vertices")
    p.add_argument("--eps0", required=True)
    p.add_argument("--words", help="test only these words instead of all of F2^n")
    p.add_argument("--bound", help="fail (exit 3) when the measure exceeds this")
    p.set_defaults(func=cmd_parity_sampler)

    p = sub.add_parser("cover-prune", parents=[common], help="prune a list to a 2-zeta cover")
    p.add_argument("--list", required=True, help="word file, one candidate per line")
    p.add_argument("--zeta", required=True)
    p.add_argument("--true", help="word file of the true list; verify the cover")
    p.set_defaults(func=cmd_cover_prune)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    p.add_argument("--filter", help="criterion number, name fragment or tag")
    p.add_argument("--fixtures", help="alternative fixtures JSON")
    p.set_defaults(func=cmd_selftest)
    return parser


def _origin(exc: BaseException) -> str:
    frames = traceback.extract_tb(exc.__traceback__)
    for frame in reversed(frames):
        path = Path(frame.filename)
        if path.parent.name == "walkcodes" and path.stem != "cli":
            return path.stem
    return "cli"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error [{_origin(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (CertificationError, DecodingFailure) as exc:
        print(f"error [{_origin(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except WalkCodesError as exc:
        print(f"error [{_origin(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except (OSError, ValueError) as exc:
        print(f"error [{_origin(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
