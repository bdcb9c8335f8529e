"""Words and linear codes over GF(2).

Words are 1-D ``uint8`` arrays holding 0/1 values.  Every bias and distance is
returned as an exact :class:`fractions.Fraction`; floating point is reserved
for the spectral code.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import (
    DimensionTooLarge,
    LengthMismatch,
    OutsideUniqueRadius,
    PreconditionError,
    SearchExhausted,
)

ENUMERATION_CAP = 24
_BLOCK = 1 << 14


def as_word(bits) -> np.ndarray:
    """Coerce a 0/1 string, sequence or array into a word."""
    if isinstance(bits, str):
        bits = bits.strip()
        if bits and set(bits) <= {"0", "1"}:
            return np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
        raise PreconditionError(f"not a binary string: {bits!r}")
    w = np.asarray(bits)
    if w.ndim != 1 or w.size == 0:
        raise PreconditionError("a word must be a non-empty 1-D sequence")
    if not np.all((w == 0) | (w == 1)):
        raise PreconditionError("word entries must be 0 or 1")
    return w.astype(np.uint8)


def word_str(w) -> str:
    return "".join("1" if b else "0" for b in np.asarray(w).ravel())


def weight(w) -> int:
    return int(np.count_nonzero(w))


def bias(w) -> Fraction:
    """Exact ``|n - 2 wt(w)| / n``."""
    w = as_word(w)
    n = w.size
    return Fraction(abs(n - 2 * weight(w)), n)


def relative_distance(a, b) -> Fraction:
    a, b = as_word(a), as_word(b)
    if a.size != b.size:
        raise LengthMismatch(f"lengths {a.size} and {b.size} differ")
    return Fraction(int(np.count_nonzero(a != b)), a.size)


def gf2_rank(matrix) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    m = np.array(matrix, dtype=np.uint8) & 1
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        pivots = np.nonzero(m[rank:, c])[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        if p != rank:
            m[[rank, p]] = m[[p, rank]]
        hits = np.nonzero(m[:, c])[0]
        hits = hits[hits != rank]
        m[hits] ^= m[rank]
        rank += 1
    return rank


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform of a length-2^m integer vector.

    ``out[s] = sum_x values[x] * (-1)^{popcount(s & x)}``.
    """
    out = np.array(values, dtype=np.int64)
    size = out.size
    if size & (size - 1):
        raise PreconditionError("length must be a power of two")
    h = 1
    while h < size:
        view = out.reshape(-1, 2, h)
        top = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = top - view[:, 1, :]
        h *= 2
    return out


def popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    return np.unpackbits(x.view(np.uint8).reshape(*x.shape, 8), axis=-1).sum(axis=-1)


def message_bits(start: int, stop: int, dim: int) -> np.ndarray:
    """Rows are the binary expansions (bit j = coefficient of row j) of start..stop-1."""
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(dim)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class LinearCode:
    """Binary linear code given by a generator matrix with independent rows."""

    generator: np.ndarray
    cap: int = field(default=ENUMERATION_CAP, compare=False)

    def __post_init__(self):
        g = np.array(self.generator, dtype=np.uint8)
        if g.ndim != 2 or g.shape[0] == 0:
            raise PreconditionError("generator must be a non-empty 2-D matrix")
        if not np.all(g <= 1):
            raise PreconditionError("generator entries must be 0 or 1")
        if g.shape[0] > g.shape[1]:
            raise PreconditionError("dimension exceeds block length")
        if gf2_rank(g) != g.shape[0]:
            raise PreconditionError("generator rows are linearly dependent")
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)

    @property
    def dimension(self) -> int:
        return self.generator.shape[0]

    @property
    def block_length(self) -> int:
        return self.generator.shape[1]

    def encode(self, message) -> np.ndarray:
        m = np.asarray(message, dtype=np.int64)
        if m.shape[-1] != self.dimension:
            raise LengthMismatch(f"message length {m.shape[-1]} != dimension {self.dimension}")
        return ((m @ self.generator.astype(np.int64)) & 1).astype(np.uint8)

    def _check_enumerable(self):
        if self.dimension > self.cap:
            raise DimensionTooLarge(f"2^{self.dimension} codewords exceed the cap 2^{self.cap}")

    def blocks(self, block: int = _BLOCK) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield (messages, codewords) in message order, ``block`` rows at a time."""
        self._check_enumerable()
        total = 1 << self.dimension
        for start in range(0, total, block):
            msgs = message_bits(start, min(total, start + block), self.dimension)
            yield msgs, self.encode(msgs)

    def codewords(self) -> np.ndarray:
        """All 2^D codewords as rows, in message order."""
        return np.concatenate([cw for _, cw in self.blocks()])


def message_of(c: LinearCode, codeword) -> np.ndarray:
    """The message m with m G = codeword, by elimination on [G^T | codeword]."""
    w = as_word(codeword)
    if w.size != c.block_length:
        raise LengthMismatch(f"word length {w.size} != block length {c.block_length}")
    aug = np.concatenate([c.generator.T, w[:, None]], axis=1).astype(np.uint8)
    dim = c.dimension
    for col in range(dim):                  # independent rows: every column has a pivot
        p = col + np.nonzero(aug[col:, col])[0][0]
        aug[[col, p]] = aug[[p, col]]
        others = np.nonzero(aug[:, col])[0]
        aug[others[others != col]] ^= aug[col]
    if aug[dim:, -1].any():
        raise PreconditionError("word is not a codeword")
    return aug[:dim, -1].copy()


def code_weights(c: LinearCode) -> np.ndarray:
    return np.concatenate([cw.sum(axis=1, dtype=np.int64) for _, cw in c.blocks()])


def code_bias(c: LinearCode) -> Fraction:
    """Largest bias of a nonzero codeword."""
    w = code_weights(c)[1:]
    n = c.block_length
    return Fraction(int(np.abs(n - 2 * w).max()), n)


def min_distance(c: LinearCode) -> Fraction:
    """Relative minimum distance (weight of the lightest nonzero codeword)."""
    return Fraction(int(code_weights(c)[1:].min()), c.block_length)


def _distances(c: LinearCode, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y = as_word(y)
    if y.size != c.block_length:
        raise LengthMismatch(f"word length {y.size} != block length {c.block_length}")
    words, dists = [], []
    for _, cw in c.blocks():
        words.append(cw)
        dists.append(np.count_nonzero(cw != y, axis=1))
    return np.concatenate(words), np.concatenate(dists)


def _lex_sorted(rows: np.ndarray) -> list[np.ndarray]:
    order = sorted(range(len(rows)), key=lambda i: rows[i].tobytes())
    return [rows[i] for i in order]


def brute_force_list_decode(c: LinearCode, y, radius) -> list[np.ndarray]:
    """Every codeword within relative distance ``radius`` of ``y``, lexicographically sorted."""
    words, dists = _distances(c, y)
    radius = Fraction(radius)
    keep = dists * radius.denominator <= radius.numerator * c.block_length
    return _lex_sorted(words[keep])


def brute_force_unique_decode(c: LinearCode, y) -> np.ndarray:
    """The codeword strictly closer than half the minimum distance, or raise."""
    words, dists = _distances(c, y)
    d_min = int(np.count_nonzero(words[1:], axis=1).min())
    best = int(dists.argmin())
    if 2 * int(dists[best]) >= d_min:
        raise OutsideUniqueRadius(
            f"nearest codeword at distance {int(dists[best])}/{c.block_length}, "
            f"half minimum distance is {d_min}/{2 * c.block_length}"
        )
    return words[best]


def random_balanced_code(dim: int, length: int, eps0, seed: int, attempts: int = 20000,
                         cap: int = ENUMERATION_CAP) -> LinearCode:
    """Seeded rejection sampling for a ``dim``-dimensional code with bias at most ``eps0``."""
    if dim > cap:
        raise DimensionTooLarge(f"dimension {dim} exceeds cap {cap}")
    eps0 = Fraction(eps0)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        g = rng.integers(0, 2, size=(dim, length), dtype=np.uint8)
        if gf2_rank(g) < dim:
            continue
        code = LinearCode(g, cap=cap)
        if code_bias(code) <= eps0:
            return code
    raise SearchExhausted(f"no [{length},{dim}] code with bias <= {eps0} in {attempts} attempts")
