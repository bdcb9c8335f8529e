"""Watch the bias of a small code shrink as walks get longer.

A [16, 2] code with bias 1/2 is lifted along t-vertex walks, first on the
complete Cayley graph on F2^4 and then on a wide replacement product.  Each row
prints the measured bias of the lifted code next to the closed-form bound.
"""
from fractions import Fraction

import numpy as np

from walkcodes.f2 import LinearCode, as_word, code_bias
from walkcodes.graphs import normalized_adjacency, parse_cayley
from walkcodes.lifting import expander_walk_collection, lift_code, parity_sampling_measure, product_walk_collection
from walkcodes.rpp import WideReplacementProduct, step_operator
from walkcodes.spectra import second_singular_value

base = LinearCode(np.stack([as_word("1111000000000000"), as_word("0000111100000000")]))
eps0 = code_bias(base)
print(f"base code: length {base.block_length}, dimension {base.dimension}, bias {eps0}")

complete = parse_cayley("cayley f2^4 " + ",".join(str(g) for g in range(1, 16)))
sigma = second_singular_value(normalized_adjacency(complete))
print(f"\nexpander walks on K16 (sigma2 = {sigma:.4f})")
print(" t   walks   lifted bias   bound")
for t in range(2, 6):
    W = expander_walk_collection(complete, t)
    lifted = code_bias(lift_code(base, W))
    bound = (float(eps0) + 2 * sigma) ** ((t - 1) // 2)
    print(f"{t:2d} {len(W):7d}   {float(lifted):.6f}      {bound:.6f}")

# outer degree 4 = 2^s, so each inner vertex spells out an outer label per step
product = WideReplacementProduct(parse_cayley("cayley f2^3 1,2,4,3"), parse_cayley("cayley f2^4 1,2,4,8,15"), 2)
gamma = max(second_singular_value(step_operator(product, i)) for i in range(product.s))
print(f"\nproduct walks, s = {product.s}, max step sigma2 = {gamma:.4f}")
print(" t   walks   parity-sampling measure at eps0 = 1/4")
for t in (2, 3):
    W = product_walk_collection(product, t)
    measure = parity_sampling_measure(W, Fraction(1, 4))
    print(f"{t:2d} {len(W):7d}   {measure} ({float(measure):.6f})")
