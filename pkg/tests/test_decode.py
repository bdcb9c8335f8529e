from fractions import Fraction

import numpy as np
import pytest

from conftest import code_of
from walkcodes.acceptance import decoding_instance, load_fixtures
from walkcodes.decode import (
    BruteForceBackend,
    DecodeList,
    DecoderConfig,
    RecursionStats,
    cascade_unique_decode,
    fixed_poly_decode,
    is_cover,
    list_decode_level,
    unique_decode_level,
    zeta_cover_prune,
)
from walkcodes.errors import DecodingFailure, EmptyList, PreconditionViolated
from walkcodes.f2 import as_word, bias


@pytest.fixture(scope="module")
def instance():
    cascade, config = decoding_instance(load_fixtures())
    return cascade, config, BruteForceBackend(cascade, seed=11)


def corrupt(word, fraction, rng):
    out = word.copy()
    out[rng.choice(word.size, size=int(fraction * word.size), replace=False)] ^= 1
    return out


def test_config_preconditions():
    with pytest.raises(PreconditionViolated):
        DecoderConfig(Fraction(1, 4), Fraction(1, 8))
    with pytest.raises(PreconditionViolated):
        DecoderConfig(Fraction(1, 8), Fraction(1, 8))
    assert DecoderConfig(Fraction(1, 8), Fraction(1, 100)).zeta == Fraction(1, 8) - Fraction(1, 64)


def test_list_decode_level(instance):
    cascade, config, backend = instance
    rng = np.random.default_rng(0)
    z = cascade.lift(cascade.base.encode([1, 0, 1]), 0, 1)
    y = cascade.lift(z, 1, 2)
    assert any(np.array_equal(w, z) for w in list_decode_level(backend, 2, y, config.eta).words())
    noisy = corrupt(y, 0.1, rng)
    assert any(np.array_equal(w, z) for w in list_decode_level(backend, 2, noisy, Fraction(1, 100)).words())


def test_list_empty_at_half_distance(instance):
    cascade, config, backend = instance
    top = backend.codewords(2)
    # a codeword pushed to distance exactly 1/2 drops out; every survivor is strictly closer
    y = top[3].copy()
    y[: y.size // 2] ^= 1
    dists = np.count_nonzero(top != y, axis=1)
    found = list_decode_level(backend, 2, y, config.eta)
    assert all(2 * d < y.size for d in [np.count_nonzero(w != y) for _, w in found])
    assert not any(np.array_equal(w, top[3]) for _, w in found)
    assert int(dists[3]) * 2 == y.size


def test_unique_decode_level(instance):
    cascade, config, backend = instance
    base = cascade.base.encode([0, 1, 1])
    y = cascade.encode([0, 1, 1])
    z, lifted = unique_decode_level(backend, 2, y, config)
    assert np.array_equal(z, cascade.lift(base, 0, 1)) and np.array_equal(lifted, y)


def test_far_word_fails(instance):
    cascade, config, backend = instance
    y = cascade.encode([1, 1, 0])
    with pytest.raises(DecodingFailure):
        unique_decode_level(backend, 2, y ^ 1, config)


def test_cascade_decoders_agree(instance):
    cascade, config, backend = instance
    rng = np.random.default_rng(1)
    for _ in range(10):
        msg = rng.integers(0, 2, 3, dtype=np.uint8)
        received = corrupt(cascade.encode(msg), 0.15, rng)
        stats = RecursionStats()
        expected = cascade.base.encode(msg)
        assert np.array_equal(cascade_unique_decode(cascade, backend, received, config), expected)
        assert np.array_equal(fixed_poly_decode(cascade, backend, received, config, stats), expected)
        assert stats.nodes <= (2 / config.eta) ** cascade.depth


def test_uncorrupted_decodes(instance):
    cascade, config, backend = instance
    trace = []
    y = cascade.encode([1, 1, 1])
    assert np.array_equal(cascade_unique_decode(cascade, backend, y, config, trace), cascade.base.encode([1, 1, 1]))
    assert [t["level"] for t in trace] == [2, 1]


def test_beyond_radius_fails(instance):
    cascade, config, backend = instance
    rng = np.random.default_rng(9)
    with pytest.raises(DecodingFailure):
        cascade_unique_decode(cascade, backend, rng.integers(0, 2, cascade.ground_size(2), dtype=np.uint8), config)


class EmptyBackend:
    def decode(self, level, received, eta):
        return DecodeList()

    def cover(self, level, received, eta, zeta):
        return DecodeList()


def test_empty_cover_fails(instance):
    cascade, config, _ = instance
    with pytest.raises(EmptyList):
        fixed_poly_decode(cascade, EmptyBackend(), cascade.encode([1, 0, 0]), config)


def test_prune_duplicates_and_complements():
    z = as_word("0011010110")
    kept = zeta_cover_prune([(z, z), (z, z), (z ^ 1, z ^ 1)], Fraction(1, 10))
    assert len(kept) == 1


def test_prune_boundary_is_strict():
    a, b = as_word("0000"), as_word("0001")
    # bias(a + b) = 1/2 = 1 - 2 zeta: not an edge
    assert len(zeta_cover_prune([(a, a), (b, b)], Fraction(1, 4))) == 2


def test_prune_two_clusters():
    rng = np.random.default_rng(4)
    centres = [rng.integers(0, 2, 40, dtype=np.uint8) for _ in range(2)]
    while bias(centres[0] ^ centres[1]) > Fraction(1, 5):
        centres[1] = rng.integers(0, 2, 40, dtype=np.uint8)
    entries = []
    for i in range(20):
        w = centres[i % 2].copy()
        w[rng.choice(40, size=int(rng.integers(0, 3)), replace=False)] ^= 1
        entries.append((w, w))
    kept = zeta_cover_prune(entries, Fraction(1, 10))
    assert len(kept) == 2
    assert is_cover(kept.words(), [w for w, _ in entries], Fraction(1, 10))
