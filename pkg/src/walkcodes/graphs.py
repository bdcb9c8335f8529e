"""Regular graphs given by rotation maps, Cayley graphs and small-bias sets."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import (
    BiasCertificationFailed,
    NotClosedUnderInverse,
    NotPowerOfTwo,
    PreconditionError,
    TooLarge,
)
from .f2 import walsh_hadamard
from .spectra import DIM_CAP


@dataclass(frozen=True)
class CayleyInfo:
    """Group ``z`` (integers mod ``order``) or ``f2`` (bit vectors of length ``order``)."""

    group: str
    order: int
    gens: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.order if self.group == "z" else 1 << self.order

    def shorthand(self) -> str:
        if self.group == "z":
            return f"cayley z{self.order} " + ",".join(map(str, self.gens))
        return f"cayley f2^{self.order} " + ",".join(format(g, f"0{self.order}b") for g in self.gens)


@dataclass(frozen=True)
class RotationGraph:
    """A d-regular graph: ``rot(v, j) = (neighbor[v, j], back_label[v, j])``."""

    neighbor: np.ndarray
    back_label: np.ndarray
    phi: np.ndarray | None = None
    cayley: CayleyInfo | None = None

    def __post_init__(self):
        nb = np.array(self.neighbor, dtype=np.int64)
        bl = np.array(self.back_label, dtype=np.int64)
        if nb.ndim != 2 or nb.shape != bl.shape or nb.size == 0:
            raise PreconditionError("rotation tables must be equal-shape n x d arrays")
        n, d = nb.shape
        if nb.min() < 0 or nb.max() >= n or bl.min() < 0 or bl.max() >= d:
            raise PreconditionError("rotation map leaves [n] x [d]")
        if not (np.array_equal(nb[nb, bl], np.broadcast_to(np.arange(n)[:, None], (n, d)))
                and np.array_equal(bl[nb, bl], np.broadcast_to(np.arange(d), (n, d)))):
            raise PreconditionError("rotation map is not an involution")
        for arr in (nb, bl):
            arr.setflags(write=False)
        object.__setattr__(self, "neighbor", nb)
        object.__setattr__(self, "back_label", bl)
        if self.phi is not None:
            phi = np.array(self.phi, dtype=np.int64)
            if not np.array_equal(bl, np.broadcast_to(phi, (n, d))):
                raise PreconditionError("supplied phi does not match the rotation map")
            phi.setflags(write=False)
            object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.neighbor.shape[0]

    @property
    def degree(self) -> int:
        return self.neighbor.shape[1]

    def rot(self, v: int, j: int) -> tuple[int, int]:
        return int(self.neighbor[v, j]), int(self.back_label[v, j])


def _group_ops(group: str, order: int):
    if group == "z":
        if order < 1:
            raise PreconditionError("Z_n needs n >= 1")
        return order, (lambda a: (-a) % order), (lambda v, a: (v + a) % order)
    if group == "f2":
        if order < 0:
            raise PreconditionError("F2^m needs m >= 0")
        return 1 << order, (lambda a: a), (lambda v, a: v ^ a)
    raise PreconditionError(f"unknown group {group!r}")


def cayley_graph(group: str, order: int, gens) -> RotationGraph:
    """Cayley graph with edge labels = generator indices and phi pairing inverses."""
    gens = tuple(int(g) for g in gens)
    size, inverse, mul = _group_ops(group, order)
    if not gens or any(not 0 <= g < size for g in gens):
        raise PreconditionError("generators must be non-empty group elements")
    positions = defaultdict(list)
    for j, g in enumerate(gens):
        positions[g].append(j)
    phi = [-1] * len(gens)
    for g, idx in positions.items():
        inv = inverse(g)
        partner = positions.get(inv, [])
        if len(partner) != len(idx):
            raise NotClosedUnderInverse(f"generator {g} and its inverse {inv} have different multiplicities")
        for a, b in zip(idx, partner):
            phi[a] = b
    phi = np.array(phi, dtype=np.int64)
    v = np.arange(size, dtype=np.int64)[:, None]
    g_arr = np.array(gens, dtype=np.int64)[None, :]
    neighbor = mul(v, g_arr)
    back = np.broadcast_to(phi, neighbor.shape)
    return RotationGraph(neighbor, back, phi=phi, cayley=CayleyInfo(group, order, gens))


def local_invertibility_check(g: RotationGraph) -> np.ndarray | None:
    """Return phi if the back label depends only on the label, else None."""
    col0 = g.back_label[0]
    if np.all(g.back_label == col0):
        return col0.copy()
    return None


def adjacency_counts(g: RotationGraph):
    """Sparse integer matrix of edge multiplicities."""
    n, d = g.neighbor.shape
    rows = np.repeat(np.arange(n), d)
    return sp.csr_matrix((np.ones(n * d, dtype=np.int64), (rows, g.neighbor.ravel())), shape=(n, n))


def normalized_adjacency(g: RotationGraph, cap: int = DIM_CAP) -> np.ndarray:
    if g.n > cap:
        raise TooLarge(f"{g.n} vertices exceed the cap {cap}")
    return adjacency_counts(g).toarray() / g.degree


# ----------------------------------------------------------------------------
# Small-bias sets
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class BiasedSet:
    m: int
    generators: tuple[int, ...]
    certified_bias: Fraction


def verify_small_bias(m: int, elements, cap: int = 16) -> Fraction:
    """Exact max over nonempty S of |E_z (-1)^{<S,z>}| via a Walsh-Hadamard transform."""
    if m > cap:
        raise TooLarge(f"m = {m} exceeds the exhaustive limit {cap}")
    elements = np.asarray(list(elements), dtype=np.int64)
    counts = np.bincount(elements, minlength=1 << m)
    spectrum = walsh_hadamard(counts)
    worst = int(np.abs(spectrum[1:]).max()) if m > 0 else 0
    return Fraction(worst, len(elements))


def _is_irreducible(poly: int, degree: int) -> bool:
    for f in range(2, 1 << (degree // 2 + 1)):
        if f.bit_length() - 1 < 1:
            continue
        if _poly_mod(poly, f) == 0:
            return False
    return True


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def irreducible_polynomial(degree: int) -> int:
    """Smallest irreducible polynomial of the given degree over GF(2) (bit i = x^i)."""
    for low in range(1 << degree):
        poly = (1 << degree) | low
        if degree == 1 or (poly & 1 and _is_irreducible(poly, degree)):
            return poly
    raise AssertionError("unreachable")


def _gf_mul(a: int, b: int, poly: int, degree: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> degree:
            a ^= poly
    return out


def aghp_generators(m: int, beta) -> BiasedSet:
    """Powering construction: for x, y in GF(q), q = m/beta, bit i is <x^i, y>."""
    beta = Fraction(beta)
    q = Fraction(m) / beta
    if q.denominator != 1 or q.numerator < 1 or q.numerator & (q.numerator - 1):
        raise NotPowerOfTwo(f"m/beta = {q} is not a power of two")
    q = q.numerator
    r = q.bit_length() - 1
    poly = irreducible_polynomial(r) if r else 0
    elements = []
    for x in range(q):
        powers = [1 % q if r else 0]
        for _ in range(1, m):
            powers.append(_gf_mul(powers[-1], x, poly, r) if r else 0)
        for y in range(q):
            z = 0
            for i, xi in enumerate(powers):
                z |= (bin(xi & y).count("1") & 1) << i
            elements.append(z)
    measured = verify_small_bias(m, elements)
    if measured > beta:
        raise BiasCertificationFailed(f"measured bias {measured} exceeds {beta}")
    return BiasedSet(m, tuple(elements), beta)


def aghp_cayley_graph(m: int, beta) -> RotationGraph:
    return cayley_graph("f2", m, aghp_generators(m, beta).generators)


def parse_cayley(text: str) -> RotationGraph:
    """Parse ``cayley z<n> g1,g2,...`` or ``cayley f2^<m> g1,g2,...``.

    Generators for F2^m may be bit strings of length m or decimal integers.
    """
    parts = text.split()
    if len(parts) != 3 or parts[0] != "cayley":
        raise PreconditionError(f"bad cayley shorthand: {text!r}")
    group, gens_text = parts[1], parts[2].split(",")
    if group.startswith("z"):
        return cayley_graph("z", int(group[1:]), [int(g) for g in gens_text])
    if group.startswith("f2^"):
        m = int(group[3:])
        gens = [int(g, 2) if len(g) == m and set(g) <= {"0", "1"} else int(g) for g in gens_text]
        return cayley_graph("f2", m, gens)
    raise PreconditionError(f"unknown group {group!r}")


def parse_graph_spec(text: str) -> RotationGraph:
    """``cayley ...`` shorthand, or ``aghp <m> <beta>`` for the small-bias Cayley graph."""
    parts = text.split()
    if parts and parts[0] == "aghp":
        if len(parts) != 3:
            raise PreconditionError(f"bad aghp shorthand: {text!r}")
        return aghp_cayley_graph(int(parts[1]), Fraction(parts[2]))
    return parse_cayley(text)


def write_graph(g: RotationGraph, stream) -> None:
    stream.write(f"graph {g.n} {g.degree}\n")
    for v in range(g.n):
        for j in range(g.degree):
            stream.write(f"{v} {j} {g.neighbor[v, j]} {g.back_label[v, j]}\n")


def read_graph(stream) -> RotationGraph:
    first = stream.readline().strip()
    if first.startswith(("cayley", "aghp")):
        return parse_graph_spec(first)
    header = first.split()
    if len(header) != 3 or header[0] != "graph":
        raise PreconditionError("graph file must start with 'graph <n> <d>' or a cayley shorthand")
    n, d = int(header[1]), int(header[2])
    neighbor = np.full((n, d), -1, dtype=np.int64)
    back = np.full((n, d), -1, dtype=np.int64)
    for line in stream:
        if not line.strip():
            continue
        v, j, w, k = map(int, line.split())
        neighbor[v, j], back[v, j] = w, k
    if (neighbor < 0).any():
        raise PreconditionError("graph file does not define rot on every (v, j)")
    return RotationGraph(neighbor, back)
