"""The tweaked s-wide replacement product and walks on it.

A product vertex (v, h) is stored as the integer ``v * |V(H)| + h``.  An inner
vertex h is read as s coordinates in [d1]: coordinate i is ``(h // d1**i) % d1``,
so for d1 a power of two coordinate i is a block of log2(d1) bits.

One tweaked step at time i takes a label pair (a, b) in [d2]^2: move inside the
cloud along H-label a, cross to a new cloud via coordinate ``i mod s`` of the
inner vertex, then move inside again along H-label b.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import (
    BoundViolated,
    IndexOutOfRange,
    PreconditionError,
    PreconditionViolated,
    TooLarge,
    TooManyWalks,
    WidthTooSmall,
)
from .f2 import as_word, bias
from .graphs import RotationGraph, adjacency_counts, local_invertibility_check, normalized_adjacency
from .spectra import DIM_CAP, operator_norm, second_singular_value

WALK_CAP = 1_000_000
ZIGZAG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WideReplacementProduct:
    outer: RotationGraph
    inner: RotationGraph
    s: int

    def __post_init__(self):
        if self.s < 1:
            raise PreconditionError("width s must be positive")
        if self.inner.n != self.outer.degree ** self.s:
            raise PreconditionError(
                f"inner graph has {self.inner.n} vertices, expected d1^s = {self.outer.degree ** self.s}")
        if local_invertibility_check(self.outer) is None:
            raise PreconditionError("outer graph is not locally invertible")

    @property
    def d1(self) -> int:
        return self.outer.degree

    @property
    def d2(self) -> int:
        return self.inner.degree

    @property
    def cloud_size(self) -> int:
        return self.inner.n

    @property
    def n_vertices(self) -> int:
        return self.outer.n * self.inner.n

    def split_vertex(self, x):
        return np.divmod(x, self.cloud_size)

    def coordinate(self, h, i: int):
        return (h // self.d1 ** i) % self.d1

    @cached_property
    def _rot_tables(self) -> list[np.ndarray]:
        tables = []
        v, h = self.split_vertex(np.arange(self.n_vertices))
        for i in range(self.s):
            a = self.coordinate(h, i)
            v2 = self.outer.neighbor[v, a]
            a2 = self.outer.back_label[v, a]
            h2 = h + (a2 - a) * self.d1 ** i
            tables.append(v2 * self.cloud_size + h2)
        return tables

    def rot_table(self, i: int) -> np.ndarray:
        """Rot_i as a permutation of product vertices (an involution)."""
        if not 0 <= i < self.s:
            raise IndexOutOfRange(f"i = {i} outside [0, {self.s})")
        return self._rot_tables[i]

    @cached_property
    def _step_tables(self) -> list[np.ndarray]:
        v, h = self.split_vertex(np.arange(self.n_vertices))
        tables = []
        for i in range(self.s):
            rot = self._rot_tables[i]
            h1 = self.inner.neighbor[h]                                  # (N, d2)
            x1 = v[:, None] * self.cloud_size + h1
            x2 = rot[x1]                                                 # (N, d2)
            v2, h2 = self.split_vertex(x2)
            h3 = self.inner.neighbor[h2]                                 # (N, d2, d2)
            tables.append((v2[:, :, None] * self.cloud_size + h3).reshape(self.n_vertices, -1))
        return tables

    def step_table(self, time: int) -> np.ndarray:
        """Next vertex for every (vertex, label pair a*d2+b) at the given time step."""
        return self._step_tables[time % self.s]


def rot_i(p: WideReplacementProduct, i: int, v: int, h: int) -> tuple[int, int]:
    x = int(p.rot_table(i)[v * p.cloud_size + h])
    return divmod(x, p.cloud_size)


def inner_walk_operator(p: WideReplacementProduct):
    """Sparse integer I (x) Adj_H."""
    return sp.kron(sp.identity(p.outer.n, dtype=np.int64, format="csr"), adjacency_counts(p.inner), format="csr")


def rot_permutation(p: WideReplacementProduct, i: int):
    n = p.n_vertices
    return sp.csr_matrix((np.ones(n, dtype=np.int64), (np.arange(n), p.rot_table(i))), shape=(n, n))


def step_counts(p: WideReplacementProduct, time: int):
    """Integer matrix d2^2 (I (x) A_H) G_i (I (x) A_H), built algebraically."""
    inner = inner_walk_operator(p)
    return (inner @ rot_permutation(p, time % p.s) @ inner).tocsr()


def step_operator(p: WideReplacementProduct, time: int, cap: int = DIM_CAP) -> np.ndarray:
    if p.n_vertices > cap:
        raise TooLarge(f"{p.n_vertices} product vertices exceed the cap {cap}")
    return step_counts(p, time).toarray() / p.d2 ** 2


@dataclass(frozen=True, eq=False)
class WalkSpace:
    """All walks from time k1 to time k2, as rows of product vertices.

    Rows are ordered lexicographically by (start vertex, label pairs).
    """

    product: WideReplacementProduct
    k1: int
    k2: int
    vertices: np.ndarray

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def starts(self) -> np.ndarray:
        return self.vertices[:, 0]

    @property
    def ends(self) -> np.ndarray:
        return self.vertices[:, -1]

    @property
    def outer_components(self) -> np.ndarray:
        return self.vertices // self.product.cloud_size


def walk_count(p: WideReplacementProduct, k1: int, k2: int) -> int:
    return p.n_vertices * p.d2 ** (2 * (k2 - k1))


def enumerate_walks(p: WideReplacementProduct, k1: int, k2: int, cap: int = WALK_CAP) -> WalkSpace:
    if not 0 <= k1 <= k2:
        raise IndexOutOfRange(f"need 0 <= k1 <= k2, got ({k1}, {k2})")
    count = walk_count(p, k1, k2)
    if count > cap:
        raise TooManyWalks(f"W[{k1},{k2}] has {count} walks, cap is {cap}")
    dtype = np.int32 if p.n_vertices < 2 ** 31 else np.int64
    walks = np.arange(p.n_vertices, dtype=dtype)[:, None]
    for time in range(k1, k2):
        nxt = p.step_table(time)[walks[:, -1]].astype(dtype)            # (m, d2^2)
        walks = np.concatenate(
            [np.repeat(walks, nxt.shape[1], axis=0), nxt.reshape(-1, 1)], axis=1)
    return WalkSpace(p, k1, k2, walks)


def walk_dump_lines(space: WalkSpace):
    v, h = space.product.split_vertex(space.vertices)
    for vr, hr in zip(v, h):
        yield " ".join(f"({a},{b})" for a, b in zip(vr, hr))


def sign_vector(p: WideReplacementProduct, z) -> np.ndarray:
    """Diagonal of the sign operator: (-1)^{z_v} on every vertex of cloud v."""
    z = as_word(z)
    if z.size != p.outer.n:
        raise PreconditionError(f"word length {z.size} != |V(G)| = {p.outer.n}")
    return np.repeat(1.0 - 2.0 * z, p.cloud_size)


def exact_lift_bias(p: WideReplacementProduct, z, t: int, cap: int = DIM_CAP) -> float:
    """|<1, P_z M_0 P_z M_1 ... M_{t-2} P_z 1>| with the sign applied at every walk vertex."""
    if p.n_vertices > cap:
        raise TooLarge(f"{p.n_vertices} product vertices exceed the cap {cap}")
    if t < 1:
        raise PreconditionError("t must be at least 1")
    signs = sign_vector(p, z)
    scale = p.d2 ** 2
    g = signs.copy()
    for time in range(t - 2, -1, -1):
        g = signs * (step_counts(p, time) @ g) / scale
    return abs(float(g.mean()))


def block_norm_bound(sigma_h: float, s: int) -> float:
    """Per-block bound sigma^s + s sigma^(s-1) + s^2 sigma^(s-3)."""
    if s < 3:
        raise WidthTooSmall("the per-block bound needs s >= 3")
    return sigma_h ** s + s * sigma_h ** (s - 1) + s * s * sigma_h ** (s - 3)


def bias_upper_bound(sigma_h2: float, s: int, t: int) -> float:
    """Bias bound for t-vertex walks when H^2 is Cayley, one factor per s-block."""
    if s < 5:
        raise WidthTooSmall("the bound needs s >= 5")
    if t < 1:
        raise PreconditionError("t must be at least 1")
    x = sigma_h2
    block = x ** (s - 1) + (s - 1) * x ** (s - 2) + (s - 1) ** 2 * x ** (s - 4)
    return block ** ((t - 1) // s)


def signed_block_norm(p: WideReplacementProduct, z, cap: int = DIM_CAP) -> float:
    """||prod_{i=0}^{s-1} P_z G_i (I (x) A_H)||_op."""
    if p.n_vertices > cap:
        raise TooLarge(f"{p.n_vertices} product vertices exceed the cap {cap}")
    signs = sp.diags(sign_vector(p, z))
    inner = inner_walk_operator(p) / p.d2
    total = sp.identity(p.n_vertices, format="csr")
    for i in range(p.s):
        total = signs @ rot_permutation(p, i) @ inner @ total
    return operator_norm(total.toarray(), cap)


def block_norm_check(p: WideReplacementProduct, z, theta: float = 0.0) -> dict:
    """Evaluate the per-block norm bound; ``holds`` is only meaningful when ``premise`` is true."""
    sigma_g = second_singular_value(normalized_adjacency(p.outer))
    sigma_h = second_singular_value(normalized_adjacency(p.inner))
    premise = float(bias(z)) + 2 * theta + 2 * sigma_g <= sigma_h ** 2
    norm = signed_block_norm(p, z)
    bound = block_norm_bound(sigma_h, p.s)
    return {"norm": norm, "bound": bound, "premise": premise, "holds": norm <= bound + ZIGZAG_TOL}


def _require_register_cayley(p: WideReplacementProduct):
    d1 = p.d1
    info = p.inner.cayley
    bits = d1.bit_length() - 1
    if d1 & (d1 - 1) or info is None or info.group != "f2" or info.order != p.s * bits:
        raise PreconditionViolated("inner graph must be a Cayley graph on F2^(s log2 d1) with d1 a power of 2")


def pseudorandomness_sides(p: WideReplacementProduct, z, k1: int, k2: int, v, w) -> tuple[float, float]:
    """Both sides of the cloud-averaging identity for the untweaked product."""
    _require_register_cayley(p)
    if not 0 <= k1 <= k2 < p.s:
        raise IndexOutOfRange(f"need 0 <= k1 <= k2 < s, got ({k1}, {k2})")
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    signs = sign_vector(p, z)
    inner = inner_walk_operator(p) / p.d2
    x = np.repeat(w, p.cloud_size)
    for i in range(k1, k2 + 1):
        x = (inner @ (signs * x))[p.rot_table(i)]
    lhs = float(np.mean(np.repeat(v, p.cloud_size) * x))

    a_g = normalized_adjacency(p.outer)
    m_z = 1.0 - 2.0 * as_word(z)
    y = w.copy()
    for _ in range(k2 - k1 + 1):
        y = a_g @ (m_z * y)
    rhs = float(np.mean(v * y))
    return lhs, rhs


def pseudorandomness_identity_check(p: WideReplacementProduct, z, k1: int, k2: int, v, w,
                                    tol: float = 1e-10) -> bool:
    lhs, rhs = pseudorandomness_sides(p, z, k1, k2, v, w)
    return abs(lhs - rhs) <= tol


def zigzag_spectral_checks(p: WideReplacementProduct, operators=None, tol: float = ZIGZAG_TOL) -> dict:
    """Check sigma_2 of each step operator against the zig-zag style bounds.

    ``operators`` overrides the step operators (used to exercise the failure path).
    """
    sigma_g = second_singular_value(normalized_adjacency(p.outer))
    sigma_h = second_singular_value(normalized_adjacency(p.inner))
    bound = sigma_g + 2 * sigma_h + sigma_h ** 2
    refined = 2 * sigma_h if sigma_g <= sigma_h else None
    if operators is None:
        operators = [step_operator(p, i) for i in range(p.s)]
    steps = [second_singular_value(op) for op in operators]
    report = {"sigma_outer": sigma_g, "sigma_inner": sigma_h, "bound": bound,
              "refined_bound": refined, "sigma_steps": steps}
    for i, value in enumerate(steps):
        if value > bound + tol:
            raise BoundViolated(f"step {i}: sigma_2 = {value} exceeds {bound}")
        if refined is not None and value > refined + tol:
            raise BoundViolated(f"step {i}: sigma_2 = {value} exceeds refined bound {refined}")
    return report
