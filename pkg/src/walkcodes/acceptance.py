"""Executable acceptance criteria.

Every criterion is a function ``fixtures -> (passed, detail)``.  Frozen
expected values (measured biases, distances, threshold constants, instance
descriptions) live in ``data/fixtures.json``; altering that file makes the
matching criterion fail by name.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .decode import (BruteForceBackend, DecoderConfig, RecursionStats,
                     cascade_unique_decode, fixed_poly_decode, is_cover, zeta_cover_prune)
from .derandomize import (agreement_poly, derandomized_round, exponent_for,
                          lift_correlation_poly, poly_eval, poly_mul, poly_pow)
from .errors import DecodingFailure, Infeasible, WalkCodesError
from .f2 import LinearCode, as_word, bias, code_bias, gf2_rank, min_distance, walsh_hadamard
from .ensembles import within_list_radius
from .graphs import (aghp_generators, cayley_graph, normalized_adjacency, parse_cayley,
                     parse_graph_spec, verify_small_bias)
from .lifting import (WalkCollection, build_cascade, direct_sum_lift, expander_walk_collection,
                      lift_bias_spectrum, parity_sampling_measure, product_walk_collection, split_operator, split_sigma2,
                      swap_operator, swap_walk_collection, tuple_masks, verify_tensor_structure)
from .params import (ParamSet, gamma, rate_report, round_two, round_two_adjust, thresholds)
from .rpp import (WideReplacementProduct, exact_lift_bias, pseudorandomness_sides,
                  step_operator, walk_count)
from .spectra import second_singular_value


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    tags: tuple[str, ...]
    check: Callable[[dict], tuple[bool, str]]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def load_fixtures(path: str | Path | None = None) -> dict:
    if path is None:
        text = resources.files("walkcodes").joinpath("data/fixtures.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _product(outer: str, inner: str, s: int) -> WideReplacementProduct:
    return WideReplacementProduct(parse_cayley(outer), parse_cayley(inner), s)


def _sigma(graph) -> float:
    return second_singular_value(normalized_adjacency(graph))


# ----------------------------------------------------------------------------
# 1, 2: spectral bounds on random desk products
# ----------------------------------------------------------------------------

# (s, log2 d1) -> AGHP (m, beta) choices with m = s log2 d1
_AGHP_CHOICES = {
    (1, 2): [(2, "1"), (2, "1/2")],
    (1, 3): [(3, "3/4"), (3, "3/8")],
    (1, 4): [(4, "1"), (4, "1/2")],
    (2, 1): [(2, "1"), (2, "1/2")],
    (2, 2): [(4, "1"), (4, "1/2")],
    (2, 3): [(6, "3/4")],
    (3, 1): [(3, "3/4"), (3, "3/8")],
    (3, 2): [(6, "3/4")],
}


def _random_outer(rng, d1: int, max_vertices: int):
    """A Cayley graph of degree d1 on Z_n or F2^m with n <= min(64, max_vertices)."""
    while True:
        if rng.random() < 0.5:
            n = int(rng.integers(max(3, d1), min(64, max_vertices) + 1))
            gens = []
            while len(gens) < d1:
                g = int(rng.integers(1, n))
                if 2 * g % n == 0 and len(gens) < d1:
                    gens.append(g)
                elif len(gens) + 2 <= d1:
                    gens += [g, n - g]
            return cayley_graph("z", n, gens)
        m = int(rng.integers(2, 7))
        if (1 << m) > max_vertices:
            continue
        gens = rng.integers(1, 1 << m, size=d1).tolist()
        return cayley_graph("f2", m, gens)


def desk_products(count: int, seed: int, max_vertices: int) -> list[WideReplacementProduct]:
    """Seeded random products with an AGHP inner graph on F2^(s log2 d1)."""
    rng = np.random.default_rng(seed)
    keys = sorted(_AGHP_CHOICES)
    out = []
    while len(out) < count:
        s, b = keys[int(rng.integers(len(keys)))]
        d1 = 1 << b
        m, beta = _AGHP_CHOICES[(s, b)][int(rng.integers(len(_AGHP_CHOICES[(s, b)])))]
        inner = cayley_graph("f2", m, aghp_generators(m, Fraction(beta)).generators)
        if inner.degree ** 2 * inner.n * 3 > 4 * max_vertices * 64:
            continue
        outer = _random_outer(rng, d1, max_vertices // inner.n)
        if outer.n * inner.n > max_vertices:
            continue
        out.append(WideReplacementProduct(outer, inner, s))
    return out


def _zigzag_table(fx: dict) -> list[dict]:
    cached = fx.setdefault("_zigzag_cache", None)
    if cached is not None:
        return cached
    rows = []
    for p in desk_products(fx["instances"], fx["seed"], fx["max_product_vertices"]):
        sg, sh = _sigma(p.outer), _sigma(p.inner)
        steps = [second_singular_value(step_operator(p, i)) for i in range(p.s)]
        rows.append({"p": p, "sigma_outer": sg, "sigma_inner": sh, "steps": steps})
    fx["_zigzag_cache"] = rows
    return rows


def check_zigzag(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["zigzag"]
    start = time.perf_counter()
    rows = _zigzag_table(fx)
    elapsed = time.perf_counter() - start
    tol = fx["tolerance"]
    worst = -math.inf
    for r in rows:
        bound = r["sigma_outer"] + 2 * r["sigma_inner"] + r["sigma_inner"] ** 2
        worst = max(worst, max(r["steps"]) - bound)
    ok = len(rows) >= 20 and worst <= tol and elapsed < fx["runtime_seconds"]
    return ok, (f"{len(rows)} products, max(sigma2 - bound) = {worst:.3g}, "
                f"{elapsed:.1f}s of {fx['runtime_seconds']}s")


def check_refined(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["zigzag"]
    rows = [r for r in _zigzag_table(fx) if r["sigma_outer"] <= r["sigma_inner"]]
    tol = fx["tolerance"]
    worst = max((max(r["steps"]) - 2 * r["sigma_inner"] for r in rows), default=-math.inf)
    ok = bool(rows) and worst <= tol
    return ok, f"{len(rows)} products with sigma2(G) <= sigma2(H), max(sigma2 - 2 sigma2(H)) = {worst:.3g}"


# ----------------------------------------------------------------------------
# 3: tensor structure of split operators
# ----------------------------------------------------------------------------

def check_tensor(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["tensor"]
    cap = fx["max_walks"]
    checked = failures = 0
    worst = 0.0
    for inst in fx["instances"]:
        p = _product(inst["outer"], inst["inner"], inst["s"])
        sigmas = {}
        top = inst["max_time"]
        for k1 in range(top + 1):
            for k2 in range(k1, top):
                for k3 in range(k2 + 1, top + 1):
                    if walk_count(p, k1, k2) > cap or walk_count(p, k2 + 1, k3) > cap:
                        continue
                    split = split_operator(p, k1, k2, k3, cap_walks=cap)
                    checked += 1
                    if not verify_tensor_structure(split):
                        failures += 1
                        continue
                    if k2 not in sigmas:
                        sigmas[k2] = second_singular_value(step_operator(p, k2))
                    worst = max(worst, abs(split_sigma2(split) - sigmas[k2]))
    ok = checked > 0 and failures == 0 and worst <= fx["tolerance"]
    return ok, f"{checked} split operators, {failures} tensor mismatches, max |sigma2 gap| = {worst:.3g}"


# ----------------------------------------------------------------------------
# 4: parity sampling bounds, exhaustive over the ground set
# ----------------------------------------------------------------------------

def _bias_profile(W: WalkCollection) -> tuple[np.ndarray, np.ndarray]:
    """(bias of z, bias of lift(z)) for every z in F2^n, as exact numerator arrays."""
    n = W.n
    spectrum = np.abs(lift_bias_spectrum(W))
    weights = np.array([bin(z).count("1") for z in range(1 << n)])
    return np.abs(n - 2 * weights), spectrum


def _sampling_violation(base_num: np.ndarray, n: int, lifted: np.ndarray, gamma_: float,
                        exponent: int) -> tuple[float, int]:
    """(max over z of bias(lift z) - (bias(z) + 2 gamma)^exponent, count of z with bound < 1)."""
    bound = (base_num / n + 2 * gamma_) ** exponent
    return float(np.max(lifted - bound)), int(np.count_nonzero(bound < 1))


def _all_words(n: int) -> np.ndarray:
    return ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def check_parity(fixtures: dict) -> tuple[bool, str]:
    """Enumerated lifts for expander and swap walks; the exact walk operator for product walks."""
    fx = fixtures["parity"]
    start = time.perf_counter()
    worst = -math.inf
    cases = nonvacuous = 0

    def record(result):
        nonlocal worst, cases, nonvacuous
        gap, useful = result
        worst = max(worst, gap)
        cases += 1
        nonvacuous += useful

    for inst in fx["expander"]:
        G = parse_graph_spec(inst["outer"])
        sg = _sigma(G)
        for t in inst["t"]:
            W = expander_walk_collection(G, t)
            base_num, lifted = _bias_profile(W)
            record(_sampling_violation(base_num, W.n, lifted / len(W), sg, (t - 1) // 2))
    for inst in fx["product"]:
        p = WideReplacementProduct(parse_graph_spec(inst["outer"]), parse_graph_spec(inst["inner"]), inst["s"])
        n = p.outer.n
        words = _all_words(n)
        base_num = np.abs(n - 2 * words.sum(axis=1).astype(np.int64))
        for t in inst["t"]:
            gam = max(second_singular_value(step_operator(p, i)) for i in range(t - 1))
            lifted = np.array([exact_lift_bias(p, z, t) for z in words])
            record(_sampling_violation(base_num, n, lifted, gam, (t - 1) // 2))
    for inst in fx["swap"]:
        p = _product(inst["outer"], inst["inner"], inst["s"])
        sr = split_sigma2(swap_operator(p, inst["r"]))
        for k in inst["k"]:
            W = swap_walk_collection(p, inst["r"], k)
            base_num, lifted = _bias_profile(W)
            record(_sampling_violation(base_num, W.n, lifted / len(W), sr, (k - 1) // 2))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and nonvacuous >= fx["min_nonvacuous"] and elapsed < fx["runtime_seconds"]
    return ok, (f"{cases} collections, max(measured - bound) = {worst:.3g}, "
                f"{nonvacuous} words with a bound below 1, {elapsed:.1f}s")


# ----------------------------------------------------------------------------
# 5: operator bias against enumeration
# ----------------------------------------------------------------------------

def check_operator_bias(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["operator_bias"]
    worst = 0.0
    cases = 0
    for inst in fx["instances"]:
        p = _product(inst["outer"], inst["inner"], inst["s"])
        n = p.outer.n
        for t in inst["t"]:
            if walk_count(p, 0, t - 1) > fx["max_walks"]:
                continue
            W = product_walk_collection(p, t)
            spectrum = np.abs(lift_bias_spectrum(W)) / len(W)
            for z in range(1 << n):
                word = ((z >> np.arange(n)) & 1).astype(np.uint8)
                worst = max(worst, abs(exact_lift_bias(p, word, t) - spectrum[z]))
                cases += 1
    return cases > 0 and worst <= fx["tolerance"], f"{cases} (z, t) pairs, max gap = {worst:.3g}"


# ----------------------------------------------------------------------------
# 6: cloud-averaging identity
# ----------------------------------------------------------------------------

def check_pseudorandomness(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["pseudorandomness"]
    rng = np.random.default_rng(fx["seed"])
    worst = 0.0
    total = 0
    for inst in fx["products"]:
        d1, s = inst["d1"], inst["s"]
        inner = cayley_graph("f2", s * (d1.bit_length() - 1), inst["inner_gens"])
        p = WideReplacementProduct(parse_cayley(inst["outer"]), inner, s)
        for _ in range(fx["trials"]):
            z = rng.integers(0, 2, p.outer.n, dtype=np.uint8)
            k1 = int(rng.integers(0, s))
            k2 = int(rng.integers(k1, s))
            v, w = rng.standard_normal((2, p.outer.n))
            lhs, rhs = pseudorandomness_sides(p, z, k1, k2, v, w)
            worst = max(worst, abs(lhs - rhs))
            total += 1
    return total >= 100 and worst <= fx["tolerance"], f"{total} random trials, max |lhs - rhs| = {worst:.3g}"


# ----------------------------------------------------------------------------
# 7: cascade equals direct lift
# ----------------------------------------------------------------------------

def _random_code(dim: int, length: int, seed: int) -> LinearCode:
    """Random full-rank code avoiding the all-ones word, whose even-arity lift vanishes."""
    rng = np.random.default_rng(seed)
    ones = np.ones((1, length), dtype=np.uint8)
    while True:
        g = rng.integers(0, 2, size=(dim, length), dtype=np.uint8)
        if gf2_rank(np.vstack([g, ones])) == dim + 1:
            return LinearCode(g)


def check_cascade_equivalence(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["cascade_equivalence"]
    results = []
    for inst in fx["instances"]:
        p = _product(inst["outer"], inst["inner"], inst["s"])
        base = _random_code(inst["dim"], p.outer.n, inst["seed"])
        s, ell = inst["s"], inst["ell"]
        cascade = build_cascade(base, p, ell, s, cap=fx["walk_cap"])
        direct = product_walk_collection(p, s ** ell, cap=fx["walk_cap"])
        top = cascade.code(ell).generator
        expected = np.stack([direct_sum_lift(g, direct) for g in base.generator])
        results.append(((s, ell), np.array_equal(top, expected), len(direct)))
    ok = all(same for _, same, _ in results) and {r[0] for r in results} >= {(2, 2), (2, 3), (3, 2)}
    detail = ", ".join(f"(s,l)={k}: {'equal' if same else 'DIFFERENT'} over {n} walks"
                       for k, same, n in results)
    return ok, detail


# ----------------------------------------------------------------------------
# 8, 10: unique decoding and the fixed-poly path
# ----------------------------------------------------------------------------

def decoding_instance(fixtures: dict):
    fx = fixtures["unique_decoding"]
    base = LinearCode(np.stack([as_word(r) for r in fx["base"]]))
    p = _product(fx["outer"], fx["inner"], fx["s"])
    cascade = build_cascade(base, p, fx["depth"], fx["top_arity"])
    return cascade, DecoderConfig(Fraction(fx["eta0"]), Fraction(fx["eta"]))


def _decoding_trials(fixtures: dict):
    """Seeded (planted message, received word) pairs strictly inside half the minimum distance."""
    fx = fixtures["unique_decoding"]
    cascade, config = decoding_instance(fixtures)
    N = cascade.ground_size(cascade.depth)
    d_min = Fraction(fx["min_distance"])
    # 2 * flips < d_min * N
    max_flips = math.ceil(d_min * N / 2) - 1
    rng = np.random.default_rng(fx["seed"])
    D = cascade.base.dimension
    trials = []
    for _ in range(fx["trials"]):
        msg = rng.integers(0, 2, D, dtype=np.uint8)
        word = cascade.encode(msg)
        flips = int(rng.integers(0, max_flips + 1))
        received = word.copy()
        received[rng.choice(N, size=flips, replace=False)] ^= 1
        trials.append((msg, received))
    return cascade, config, trials


def _measured_code_facts(cascade) -> dict:
    top = cascade.code(cascade.depth)
    return {"eta": code_bias(top), "min_distance": min_distance(top),
            "eta0": max(code_bias(cascade.code(i)) for i in range(cascade.depth))}


def check_unique_decoding(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["unique_decoding"]
    cascade, config, trials = _decoding_trials(fixtures)
    facts = _measured_code_facts(cascade)
    frozen_ok = (facts["eta"] == Fraction(fx["eta"]) and facts["min_distance"] == Fraction(fx["min_distance"])
                 and facts["eta0"] <= Fraction(fx["eta0"]))
    backend = BruteForceBackend(cascade, seed=fx["seed"])
    successes = 0
    for msg, received in trials:
        try:
            got = cascade_unique_decode(cascade, backend, received, config)
        except DecodingFailure:
            continue
        successes += np.array_equal(got, cascade.base.encode(msg))
    # beyond the list radius: random words far from every codeword
    rng = np.random.default_rng(fx["seed"] + 1)
    N = cascade.ground_size(cascade.depth)
    words = backend.codewords(cascade.depth)
    failures_ok = wrong = 0
    tested = 0
    while tested < fx["beyond_trials"]:
        received = rng.integers(0, 2, N, dtype=np.uint8)
        dists = np.count_nonzero(words != received, axis=1)
        if any(within_list_radius(Fraction(int(d), N), config.eta) for d in dists):
            continue
        tested += 1
        try:
            cascade_unique_decode(cascade, backend, received, config)
            wrong += 1
        except DecodingFailure:
            failures_ok += 1
    ok = frozen_ok and successes == len(trials) and wrong == 0
    return ok, (f"eta = {facts['eta']} (frozen {fx['eta']}), {successes}/{len(trials)} decoded, "
                f"{failures_ok}/{tested} beyond-radius words reported Failure, {wrong} wrong answers")


def check_fixed_poly(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["unique_decoding"]
    cascade, config, trials = _decoding_trials(fixtures)
    backend = BruteForceBackend(cascade, seed=fx["seed"])
    eta = Fraction(fx["eta"])
    node_cap = (fixtures["fixed_poly"]["node_exponent_base"] / eta) ** cascade.depth
    disagreements = 0
    worst_nodes = 0
    for _, received in trials:
        try:
            a = cascade_unique_decode(cascade, backend, received, config)
        except DecodingFailure:
            a = None
        stats = RecursionStats()
        try:
            b = fixed_poly_decode(cascade, backend, received, config, stats)
        except DecodingFailure:
            b = None
        worst_nodes = max(worst_nodes, stats.nodes)
        if (a is None) != (b is None) or (a is not None and not np.array_equal(a, b)):
            disagreements += 1
    ok = disagreements == 0 and worst_nodes <= node_cap
    return ok, (f"{len(trials)} trials, {disagreements} disagreements, max recursion nodes "
                f"{worst_nodes} <= (2/eta)^l = {float(node_cap):.1f}")


# ----------------------------------------------------------------------------
# 9: cover compactness
# ----------------------------------------------------------------------------

def _correlations(W: WalkCollection, received: np.ndarray) -> np.ndarray:
    """sum over tuples of (-1)^(received_w + lift(z)_w), for every z in F2^n."""
    signs = 1 - 2 * received.astype(np.int64)
    counts = np.bincount(tuple_masks(W), weights=signs, minlength=1 << W.n).astype(np.int64)
    return walsh_hadamard(counts)


def _true_list(W: WalkCollection, received: np.ndarray, eta: Fraction) -> list[np.ndarray]:
    """All z in F2^n with dist(lift z, received) <= 1/2 - sqrt(eta), exhaustively."""
    corr = _correlations(W, received)
    size = len(W)
    # distance = (1 - corr/size)/2, so 1/2 - distance = corr/(2 size)
    hits = [z for z in np.flatnonzero(corr >= 0)
            if Fraction(int(corr[z]) ** 2, 4 * size * size) >= eta]
    return [((int(z) >> np.arange(W.n)) & 1).astype(np.uint8) for z in hits]


def _cliques(words: list[np.ndarray], zeta: Fraction) -> list[list[int]] | None:
    """Partition into groups that are cliques of the pruning graph, or None."""
    threshold = 1 - 2 * zeta
    adjacent = lambda a, b: bias(a ^ b) > threshold
    groups: list[list[int]] = []
    for i, w in enumerate(words):
        homes = [g for g in groups if adjacent(w, words[g[0]])]
        if len(homes) > 1:
            return None
        if homes:
            homes[0].append(i)
        else:
            groups.append([i])
    for g in groups:
        if not all(adjacent(words[a], words[b]) for a in g for b in g if a < b):
            return None
    return groups


def cover_instances(fixtures: dict):
    """Yield (c, W, received, true list, clusters) for every requested cluster count."""
    fx = fixtures["cover"]
    W = expander_walk_collection(parse_cayley(fx["outer"]), fx["t"])
    zeta, eta = Fraction(fx["zeta"]), Fraction(fx["eta"])
    n = W.n
    for c in fx["clusters"]:
        for attempt in range(fx["search"]):
            rng = np.random.default_rng([fx["seed"], c, attempt])
            centers = []
            while len(centers) < c:
                z = rng.integers(0, 2, n, dtype=np.uint8)
                if all(bias(z ^ x) <= 1 - 2 * zeta for x in centers):
                    centers.append(z)
            owner = rng.permutation(len(W)) % c
            received = np.empty(len(W), dtype=np.uint8)
            for j, z in enumerate(centers):
                received[owner == j] = direct_sum_lift(z, W)[owner == j]
            truth = _true_list(W, received, eta)
            groups = _cliques(truth, zeta)
            if groups is not None and len(groups) == c:
                yield c, W, received, truth, groups
                break
        else:
            raise WalkCodesError(f"no {c}-cluster instance found in {fx['search']} attempts")


def check_cover(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["cover"]
    zeta, eta = Fraction(fx["zeta"]), Fraction(fx["eta"])
    W = expander_walk_collection(parse_cayley(fx["outer"]), fx["t"])
    measured = parity_sampling_measure(W, 1 - 2 * zeta)
    johnson = math.floor(1 / eta)
    lines = [f"eta = {measured} (frozen {fx['eta']})"]
    ok = measured == eta
    for c, W, received, truth, groups in cover_instances(fixtures):
        rng = np.random.default_rng([fx["seed"], c])
        # exact list with duplicates, shuffled
        exact = [truth[i] for i in rng.permutation(np.repeat(np.arange(len(truth)), 2))]
        pruned = zeta_cover_prune([(z, None) for z in exact], zeta)
        exact_ok = (len(pruned) <= min(c, johnson)
                    and is_cover(pruned.words(), truth, 2 * zeta))
        # perturbed cover: fewer than zeta*n flips, kept only inside the list radius
        cover = []
        max_flips = math.ceil(zeta * W.n) - 1
        for z in truth:
            cover.append(z)
            for _ in range(3):
                pert = z.copy()
                pert[rng.choice(W.n, size=int(rng.integers(1, max_flips + 1)), replace=False)] ^= 1
                d = Fraction(int(np.count_nonzero(direct_sum_lift(pert, W) != received)), len(W))
                if within_list_radius(d, eta):
                    cover.append(pert)
        cover = [cover[i] for i in rng.permutation(len(cover))]
        pruned_p = zeta_cover_prune([(z, None) for z in cover], zeta)
        perturbed_ok = len(pruned_p) <= johnson and is_cover(pruned_p.words(), truth, 2 * zeta)
        ok = ok and exact_ok and perturbed_ok
        lines.append(f"c={c}: |list|={len(truth)}, pruned {len(pruned)} (perturbed {len(pruned_p)} "
                     f"from {len(cover)}) <= min(c, {johnson}), 2zeta-cover "
                     f"{'yes' if exact_ok and perturbed_ok else 'NO'}")
    return ok, "; ".join(lines)


# ----------------------------------------------------------------------------
# 11: AGHP sets
# ----------------------------------------------------------------------------

def check_aghp(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["aghp"]
    ok = True
    parts = []
    for case in fx["cases"]:
        m, beta = case["m"], Fraction(case["beta"])
        try:
            A = aghp_generators(m, beta)
        except WalkCodesError as exc:
            ok = False
            parts.append(f"m={m}, beta={beta}: {exc}")
            continue
        measured = verify_small_bias(m, A.generators)
        sigma = _sigma(cayley_graph("f2", m, A.generators))
        good = (len(A.generators) == case["size"] == m * m / beta ** 2
                and measured <= beta and sigma <= float(beta) + fx["tolerance"])
        ok = ok and good
        parts.append(f"m={m}, beta={beta}: |A|={len(A.generators)}, bias {measured}, sigma2 {sigma:.4f}")
    return ok, "; ".join(parts)


# ----------------------------------------------------------------------------
# 12: parameter engine
# ----------------------------------------------------------------------------

def check_params(fixtures: dict) -> tuple[bool, str]:
    fx = fixtures["params"]
    start = time.perf_counter()
    chain_ok = True
    points = 0
    for s in fx["widths"]:
        alpha = Fraction(1, s)
        x_min = 4 * math.log2(s) * s ** 5
        for mult in fx["multipliers"]:
            x = x_min * mult
            p = gamma(fx["dimension"], x, alpha)
            report = rate_report(p)
            q = round_two(fx["dimension"], x, alpha)
            chain_ok = chain_ok and report["ok"] and all(q.gates.values())
            points += 1
    try:
        gamma(fx["dimension"], fx["infeasible_log2_inv_eps"], Fraction(1, fx["widths"][0]))
        infeasible_ok = False
    except Infeasible:
        infeasible_ok = True

    rng = np.random.default_rng(fx["seed"])
    sandwich_ok = True
    done = 0
    while done < fx["sandwich_trials"]:
        s = int(2 ** rng.integers(1, 9))
        t = int(rng.integers(s * s + 1, s ** 5 + 2))
        ell = math.ceil(math.log(t, s) - 1e-12)
        if s ** ell == t or s ** (ell - 1) >= t:
            continue
        adjusted = round_two_adjust(ParamSet(alpha=Fraction(1, s), s=s, Q=s, t=t))
        scaled = Fraction(adjusted.t_prime - 1, s)
        sandwich_ok = sandwich_ok and (t - 1 <= scaled <= (1 + Fraction(2, s)) * (t - 1))
        done += 1

    th = thresholds(Fraction(1, 100), 35)
    tol = fx["tolerance"]
    k_ok = abs(th.k0 - fx["k0"]) <= tol and abs(th.k0_prime - fx["k0_prime"]) <= tol
    printed_ok = (f"{th.k0:.{len(fx['k0_printed'].split('.')[1])}f}" == fx["k0_printed"]
                  and f"{th.k0_prime:.{len(fx['k0_prime_printed'].split('.')[1])}f}" == fx["k0_prime_printed"])
    elapsed = time.perf_counter() - start
    ok = chain_ok and infeasible_ok and sandwich_ok and k_ok and printed_ok and elapsed < fx["runtime_seconds"]
    return ok, (f"rate chain {'ok' if chain_ok else 'FAILED'} on {points} (s, eps) points, "
                f"2^-{fx['infeasible_log2_inv_eps']} at s={fx['widths'][0]} "
                f"{'Infeasible' if infeasible_ok else 'ACCEPTED'}, sandwich {'ok' if sandwich_ok else 'FAILED'} "
                f"on {done} inputs, k0 = {th.k0:.4f} (expected {fx['k0']:.4f}), "
                f"k0' = {th.k0_prime:.4f} (expected {fx['k0_prime']:.4f}), {elapsed:.1f}s")


# ----------------------------------------------------------------------------
# 13: derandomized rounding
# ----------------------------------------------------------------------------

def derandomization_instance(inst: dict):
    rng = np.random.default_rng(inst["seed"])
    n = inst["n"]
    planted = 1 - 2 * rng.integers(0, 2, n)
    tuples = np.stack([rng.choice(n, size=inst["arity"], replace=False) for _ in range(inst["tuples"])])
    lifted = np.prod(planted[tuples], axis=1)
    noise = rng.random(len(tuples)) < inst["noise"]
    received = np.where(noise, -lifted, lifted)
    A = lift_correlation_poly(received, tuples)
    B = agreement_poly(planted)
    means = [Fraction(inst["bias"]).limit_denominator(1000) * int(v) for v in planted]
    return n, A, B, means


def check_derandomization(fixtures: dict) -> tuple[bool, str]:
    ok = True
    parts = []
    for inst in fixtures["derandomization"]["instances"]:
        n, A, B, means = derandomization_instance(inst)
        a, beta, delta = Fraction(inst["a"]), Fraction(inst["beta"]), Fraction(inst["delta"])
        try:
            omega, history = derandomized_round(means, A, B, a, beta, delta)
        except WalkCodesError as exc:
            ok = False
            parts.append(f"n={n}: {type(exc).__name__}")
            continue
        k = exponent_for(a, beta, delta)
        objective = poly_mul(A, poly_pow(B, 2 * k))
        a_val, b_val = poly_eval(A, omega), poly_eval(B, omega)
        guarantees = a_val >= a * (1 - beta) and abs(b_val) >= 1 - delta
        monotone = all(x <= y for x, y in zip(history, history[1:]))
        points = [1 - 2 * ((z >> np.arange(n)) & 1) for z in range(1 << n)]
        best = max(poly_eval(objective, pt) for pt in points)
        feasible = [pt for pt in points
                    if poly_eval(A, pt) >= a * (1 - beta) and abs(poly_eval(B, pt)) >= 1 - delta]
        cross = poly_eval(objective, omega) <= best and any(np.array_equal(pt, omega) for pt in feasible)
        ok = ok and guarantees and monotone and cross
        parts.append(f"n={n}: A={float(a_val):.3f}, |B|={abs(float(b_val)):.3f}, "
                     f"{'monotone' if monotone else 'NOT monotone'}, {len(feasible)} exhaustive feasible points")
    return ok, "; ".join(parts)


CRITERIA: list[Criterion] = [
    Criterion(1, "zig-zag bound", ("spectral",), check_zigzag),
    Criterion(2, "refined bound", ("spectral",), check_refined),
    Criterion(3, "tensor structure", ("spectral", "splitting"), check_tensor),
    Criterion(4, "parity sampling", ("sampling",), check_parity),
    Criterion(5, "operator vs enumeration bias", ("spectral", "sampling"), check_operator_bias),
    Criterion(6, "pseudorandomness identity", ("spectral",), check_pseudorandomness),
    Criterion(7, "cascade equivalence", ("cascade",), check_cascade_equivalence),
    Criterion(8, "unique decoding", ("decode",), check_unique_decoding),
    Criterion(9, "cover compactness", ("decode",), check_cover),
    Criterion(10, "fixed-poly path", ("decode",), check_fixed_poly),
    Criterion(11, "AGHP certification", ("graphs", "spectral"), check_aghp),
    Criterion(12, "parameter engine", ("params",), check_params),
    Criterion(13, "derandomization", ("decode",), check_derandomization),
]


def select(filter_text: str | None = None) -> list[Criterion]:
    """Criteria whose number, name or tag matches ``filter_text`` (all when empty)."""
    if not filter_text:
        return list(CRITERIA)
    key = filter_text.lower()
    return [c for c in CRITERIA
            if key == str(c.number) or key in c.name.lower() or key in c.tags]


def run_criterion(criterion: Criterion, fixtures: dict) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, detail = criterion.check(fixtures)
    except Exception as exc:                                # report, never crash the suite
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(criterion.number, criterion.name, bool(passed), detail,
                           time.perf_counter() - start)


def run(filter_text: str | None = None, fixtures: dict | None = None, echo=None) -> list[CriterionResult]:
    fixtures = load_fixtures() if fixtures is None else fixtures
    results = []
    for criterion in select(filter_text):
        result = run_criterion(criterion, fixtures)
        if echo is not None:
            echo(result.line())
        results.append(result)
    return results
