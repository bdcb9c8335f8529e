"""Decoding a cascade top-down through per-level list decoders.

A backend answers two questions about a level i: which words z over level i's
ground set lift close to a received word (``decode``), and a list that merely
covers those answers up to small perturbations and complements (``cover``).
The brute-force backend answers both by enumerating the base code.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol

import numpy as np

from .errors import DecodingFailure, EmptyList, PreconditionViolated
from .f2 import as_word, bias, brute_force_unique_decode
from .ensembles import within_list_radius
from .lifting import Cascade, direct_sum_lift

K_DEFAULT = 2 ** 30
K_PRIME_DEFAULT = 2 ** 30


@dataclass
class DecodeList:
    """Pairs (z, y) with y the lift of z through the level's collection."""

    entries: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def words(self) -> list[np.ndarray]:
        return [z for z, _ in self.entries]


@dataclass(frozen=True)
class DecoderConfig:
    eta0: Fraction
    eta: Fraction
    K: int = K_DEFAULT
    K_prime: int = K_PRIME_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "eta0", Fraction(self.eta0))
        object.__setattr__(self, "eta", Fraction(self.eta))
        if not 0 < self.eta < self.eta0 < Fraction(1, 4):
            raise PreconditionViolated(f"need 0 < eta < eta0 < 1/4, got eta={self.eta}, eta0={self.eta0}")

    @property
    def zeta(self) -> Fraction:
        return Fraction(1, 8) - self.eta0 / 8


class ListDecoderBackend(Protocol):
    def decode(self, level: int, received: np.ndarray, eta) -> DecodeList: ...

    def cover(self, level: int, received: np.ndarray, eta, zeta) -> DecodeList: ...


def _distance(a: np.ndarray, b: np.ndarray) -> Fraction:
    return Fraction(int(np.count_nonzero(a != b)), a.size)


class BruteForceBackend:
    """Enumerates every base codeword and its lift to each level.

    ``cover`` returns, for every true list entry, the entry itself plus seeded
    perturbations (fewer than a zeta fraction of flipped positions), exact
    duplicates and complemented perturbations, keeping only candidates whose
    lift stays inside the list radius.
    """

    def __init__(self, cascade: Cascade, seed: int = 0, perturbations: int = 3, duplicates: int = 1):
        self.cascade = cascade
        self.seed = seed
        self.perturbations = perturbations
        self.duplicates = duplicates
        words = cascade.base.codewords()
        self._words = [words]
        for level in range(1, cascade.depth + 1):
            coll = cascade.levels[level - 1].collection
            self._words.append(np.bitwise_xor.reduce(self._words[-1][:, coll.tuples], axis=2))

    def codewords(self, level: int) -> np.ndarray:
        return self._words[level]

    def decode(self, level: int, received, eta) -> DecodeList:
        received = as_word(received)
        lifted = self._words[level]
        dists = np.count_nonzero(lifted != received, axis=1)
        out = DecodeList()
        for idx in np.argsort(dists, kind="stable"):
            if within_list_radius(Fraction(int(dists[idx]), received.size), eta):
                out.entries.append((self._words[level - 1][idx], lifted[idx]))
        return out

    def cover(self, level: int, received, eta, zeta) -> DecodeList:
        received = as_word(received)
        zeta = Fraction(zeta)
        coll = self.cascade.levels[level - 1].collection
        rng = np.random.default_rng([self.seed, level, zlib.crc32(received.tobytes())])
        n = coll.n
        max_flips = max(0, min(math.ceil(zeta * n) - 1, n))     # strictly fewer than zeta*n
        out = DecodeList()
        for z, y in self.decode(level, received, eta):
            candidates = [z] * (1 + self.duplicates)
            for _ in range(self.perturbations):
                flips = int(rng.integers(0, max_flips + 1))
                pert = z.copy()
                pert[rng.choice(n, size=flips, replace=False)] ^= 1
                candidates.append(pert)
                candidates.append(pert ^ 1)
            for cand in candidates:
                lifted = direct_sum_lift(cand, coll)
                if within_list_radius(_distance(lifted, received), eta):
                    out.entries.append((cand, lifted))
        order = rng.permutation(len(out.entries))
        out.entries = [out.entries[i] for i in order]
        return out


def list_decode_level(backend: ListDecoderBackend, level: int, received, eta) -> DecodeList:
    return backend.decode(level, as_word(received), eta)


def _closest(candidates: list[tuple[np.ndarray, np.ndarray]], received: np.ndarray):
    """The (payload, lifted) pair closest to ``received``; ties and emptiness fail."""
    if not candidates:
        raise EmptyList("no candidate within the list-decoding radius")
    dists = [int(np.count_nonzero(y != received)) for _, y in candidates]
    best = min(dists)
    winners = {candidates[i][1].tobytes() for i, d in enumerate(dists) if d == best}
    if len(winners) > 1:
        raise DecodingFailure("several distinct candidates are equally close")
    return candidates[dists.index(best)]


def unique_decode_level(backend: ListDecoderBackend, level: int, received, config: DecoderConfig):
    """Closest list entry (z, lift(z)) to the received word."""
    if not config.eta < min(config.eta0, Fraction(1, 16)):
        raise PreconditionViolated("unique decoding through the list needs eta < min(eta0, 1/16)")
    received = as_word(received)
    return _closest(list(backend.decode(level, received, config.eta)), received)


def cascade_unique_decode(cascade: Cascade, backend: ListDecoderBackend, received,
                          config: DecoderConfig, trace: list | None = None) -> np.ndarray:
    """Base codeword whose lift is the unique closest decoding of ``received``."""

    def solve(level: int, word: np.ndarray) -> np.ndarray:
        if level == 0:
            return brute_force_unique_decode(cascade.base, word)
        found = backend.decode(level, word, config.eta)
        if trace is not None:
            trace.append({"mode": "unique", "level": level, "list_size": len(found)})
        candidates = []
        for z, _ in found:
            try:
                base = solve(level - 1, z)
            except DecodingFailure:
                continue
            if np.array_equal(cascade.lift(base, 0, level - 1), z):
                candidates.append((base, cascade.lift(base, 0, level)))
        return _closest(candidates, word)[0]

    if not config.eta < min(config.eta0, Fraction(1, 16)):
        raise PreconditionViolated("unique decoding through the list needs eta < min(eta0, 1/16)")
    return solve(cascade.depth, as_word(received))


def zeta_cover_prune(entries, zeta, eta=None) -> DecodeList:
    """Greedy maximal independent set in order; z, z' are adjacent when bias(z + z') > 1 - 2 zeta."""
    threshold = 1 - 2 * Fraction(zeta)
    kept = DecodeList()
    for z, y in entries:
        if all(bias(z ^ k) <= threshold for k, _ in kept):
            kept.entries.append((z, y))
    return kept


def is_cover(cover_words, true_words, zeta) -> bool:
    """Every true word is within < zeta of some cover word or its complement."""
    threshold = 1 - 2 * Fraction(zeta)
    return all(any(bias(t ^ c) > threshold for c in cover_words) for t in true_words)


@dataclass
class RecursionStats:
    nodes: int = 0
    per_level: dict = field(default_factory=dict)


def fixed_poly_decode(cascade: Cascade, backend: ListDecoderBackend, received,
                      config: DecoderConfig, stats: RecursionStats | None = None,
                      trace: list | None = None) -> np.ndarray:
    """Decode via covers: prune each cover, recurse on survivors and their complements."""
    stats = stats if stats is not None else RecursionStats()
    zeta = config.zeta

    def solve(level: int, word: np.ndarray) -> np.ndarray:
        stats.nodes += 1
        stats.per_level[level] = stats.per_level.get(level, 0) + 1
        if level == 0:
            return brute_force_unique_decode(cascade.base, word)
        cover = backend.cover(level, word, config.eta, zeta)
        pruned = zeta_cover_prune(cover, zeta, config.eta)
        if trace is not None:
            trace.append({"mode": "fixedpoly", "level": level, "cover_size": len(cover),
                          "pruned_size": len(pruned)})
        candidates = []
        for z, _ in pruned:
            for guess in (z, z ^ 1):
                try:
                    base = solve(level - 1, guess)
                except DecodingFailure:
                    continue
                lifted = cascade.lift(base, 0, level)
                if within_list_radius(_distance(lifted, word), config.eta):
                    candidates.append((base, lifted))
        return _closest(candidates, word)[0]

    return solve(cascade.depth, as_word(received))
