"""Encode through a two-level cascade, corrupt, and decode two ways.

The unique decoder walks down the cascade taking the closest list entry at each
level.  The fixed-polynomial decoder works from pruned covers and counts its
recursion nodes.  Both must return the planted base codeword.
"""
from fractions import Fraction

import numpy as np

from walkcodes.decode import BruteForceBackend, DecoderConfig, RecursionStats, cascade_unique_decode, fixed_poly_decode
from walkcodes.f2 import LinearCode, as_word, code_bias, message_of, min_distance, word_str
from walkcodes.graphs import parse_cayley
from walkcodes.lifting import build_cascade
from walkcodes.rpp import WideReplacementProduct

rows = ["0111101101100010", "0001001011110011", "0111011010001001"]
base = LinearCode(np.stack([as_word(r) for r in rows]))
product = WideReplacementProduct(parse_cayley("cayley f2^4 6,3,2,7"), parse_cayley("cayley f2^4 6,9,3"), 2)
cascade = build_cascade(base, product, depth=2, top_arity=2)

for level in range(cascade.depth + 1):
    code = cascade.code(level)
    print(f"level {level}: length {code.block_length:6d}, bias {code_bias(code)}")

top = cascade.code(cascade.depth)
eta = code_bias(top)
config = DecoderConfig(eta0=Fraction(1, 8), eta=eta)
backend = BruteForceBackend(cascade, seed=1)
d_min = min_distance(top)
print(f"top minimum distance {d_min}, decoding with eta = {eta}, zeta = {config.zeta}")

rng = np.random.default_rng(2024)
message = as_word("110")
sent = cascade.encode(message)
flips = int(float(d_min) * sent.size / 2) - 1
received = sent.copy()
received[rng.choice(sent.size, size=flips, replace=False)] ^= 1
print(f"flipped {flips} of {sent.size} bits ({flips / sent.size:.3f})")

trace = []
unique = cascade_unique_decode(cascade, backend, received, config, trace)
for entry in trace:
    print("  unique:", entry)
stats = RecursionStats()
fixed = fixed_poly_decode(cascade, backend, received, config, stats)
print(f"  fixed-poly recursion nodes: {stats.nodes} (per level {stats.per_level})")
print(f"unique decoder message     {word_str(message_of(base, unique))}")
print(f"fixed-poly decoder message {word_str(message_of(base, fixed))}")
print(f"planted message            {word_str(message)}")
