"""Direct-sum lifting over tuple collections, split operators and code cascades."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .errors import (
    BadIndices,
    BadResidue,
    GroundSetTooLarge,
    LengthMismatch,
    PreconditionError,
    TooLarge,
    TooManyWalks,
)
from .f2 import LinearCode, as_word, popcount, walsh_hadamard
from .graphs import RotationGraph
from .rpp import WALK_CAP, WideReplacementProduct, enumerate_walks, step_counts, walk_count
from .spectra import DIM_CAP, singular_values

EXHAUSTIVE_LIMIT = 20
ENTRY_CAP = 20_000_000


@dataclass(frozen=True, eq=False)
class WalkCollection:
    """A multiset of k-tuples over the ground set [n], weighted uniformly.

    ``product``/``block`` record where the tuples come from when they are walks on
    a replacement product: tuple entry j then covers product times
    ``[j*block, (j+1)*block - 1]``.  ``vertices`` holds the product-vertex rows for
    collections whose entries are outer-graph vertices.
    """

    tuples: np.ndarray
    n: int
    provenance: str = "explicit"
    product: WideReplacementProduct | None = None
    block: int = 1
    vertices: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.tuples)
        if t.ndim != 2 or t.shape[0] == 0 or t.shape[1] == 0:
            raise PreconditionError("a walk collection needs at least one non-empty tuple")
        if t.min() < 0 or t.max() >= self.n:
            raise PreconditionError("tuple entries must lie in [n]")
        object.__setattr__(self, "tuples", t)

    @property
    def arity(self) -> int:
        return self.tuples.shape[1]

    def __len__(self) -> int:
        return self.tuples.shape[0]


def direct_sum_lift(z, W: WalkCollection) -> np.ndarray:
    """Bit per tuple: XOR of z over the tuple's entries."""
    z = as_word(z)
    if z.size != W.n:
        raise LengthMismatch(f"word length {z.size} != ground set size {W.n}")
    return np.bitwise_xor.reduce(z[W.tuples], axis=1)


def lift_code(code: LinearCode, W: WalkCollection) -> LinearCode:
    """Lift each generator row; raises if the lift is not injective."""
    rows = np.stack([direct_sum_lift(g, W) for g in code.generator])
    return LinearCode(rows, cap=code.cap)


def tuple_masks(W: WalkCollection) -> np.ndarray:
    return np.bitwise_xor.reduce(np.left_shift(np.int64(1), W.tuples.astype(np.int64)), axis=1)


def lift_bias_spectrum(W: WalkCollection) -> np.ndarray:
    """Signed sum over tuples of (-1)^{lift(z)}, for every z in F2^n (index = z as integer)."""
    if W.n > EXHAUSTIVE_LIMIT:
        raise GroundSetTooLarge(f"n = {W.n} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}")
    counts = np.bincount(tuple_masks(W), minlength=1 << W.n)
    return walsh_hadamard(counts)


def parity_sampling_measure(W: WalkCollection, eps0, words=None) -> Fraction:
    """Max bias of lift(z) over tested z with bias(z) <= eps0.

    Exhaustive over F2^n when ``words`` is None, which certifies the
    (eps0, result) parity-sampling property.
    """
    eps0 = Fraction(eps0)
    n = W.n
    if words is None:
        spectrum = lift_bias_spectrum(W)
        weights = popcount(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
        ok = np.abs(n - 2 * weights) * eps0.denominator <= eps0.numerator * n
        return Fraction(int(np.abs(spectrum[ok]).max()), len(W)) if ok.any() else Fraction(0)
    best = Fraction(0)
    for z in words:
        z = as_word(z)
        if Fraction(abs(n - 2 * int(z.sum())), n) <= eps0:
            y = direct_sum_lift(z, W)
            best = max(best, Fraction(abs(len(y) - 2 * int(y.sum())), len(y)))
    return best


def expander_walk_collection(G: RotationGraph, t: int, cap: int = WALK_CAP) -> WalkCollection:
    """All t-vertex walks on G, ordered by (start vertex, labels)."""
    if t < 1:
        raise PreconditionError("t must be at least 1")
    count = G.n * G.degree ** (t - 1)
    if count > cap:
        raise TooManyWalks(f"{count} walks exceed the cap {cap}")
    walks = np.arange(G.n)[:, None]
    for _ in range(t - 1):
        nxt = G.neighbor[walks[:, -1]]
        walks = np.concatenate([np.repeat(walks, G.degree, axis=0), nxt.reshape(-1, 1)], axis=1)
    return WalkCollection(walks, G.n, "expander")


def product_walk_collection(p: WideReplacementProduct, t: int, cap: int = WALK_CAP) -> WalkCollection:
    """All t-vertex tweaked walks from time 0, projected to outer vertices."""
    space = enumerate_walks(p, 0, t - 1, cap)
    return WalkCollection(space.outer_components, p.outer.n, "product", p, 1, space.vertices)


# ----------------------------------------------------------------------------
# Split operators
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SplitOperator:
    """S[k1,k2,k3] = counts / denominator, rows W[k1,k2], columns W[k2+1,k3]."""

    k1: int
    k2: int
    k3: int
    counts: sp.csr_matrix
    denominator: int
    row_starts: np.ndarray
    row_ends: np.ndarray
    col_starts: np.ndarray
    col_ends: np.ndarray
    product: WideReplacementProduct | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def matrix(self):
        return self.counts.astype(float) / self.denominator

    def balanced_matrix(self):
        """The operator as a matrix between standard (unweighted) inner-product spaces.

        Under uniform measures on rows and columns, singular values of S equal the
        matrix singular values of sqrt(|cols|/|rows|) S.
        """
        rows, cols = self.shape
        return self.matrix() * np.sqrt(cols / rows)


def _group_by(values: np.ndarray, size: int) -> np.ndarray:
    """members[y] = indices i with values[i] == y (equal group sizes required)."""
    order = np.argsort(values, kind="stable")
    counts = np.bincount(values, minlength=size)
    if counts.min() != counts.max():
        raise PreconditionError("walks are not evenly spread over start vertices")
    return order.reshape(size, counts[0])


def split_operator(p: WideReplacementProduct, k1: int, k2: int, k3: int,
                   cap_walks: int = WALK_CAP, cap_entries: int = ENTRY_CAP) -> SplitOperator:
    """Entry (w, w') = number of label pairs joining end(w) to start(w') / d2^(2(k3-k2))."""
    if not 0 <= k1 <= k2 < k3:
        raise BadIndices(f"need 0 <= k1 <= k2 < k3, got ({k1}, {k2}, {k3})")
    rows = enumerate_walks(p, k1, k2, cap_walks)
    cols = enumerate_walks(p, k2 + 1, k3, cap_walks)
    labels = p.d2 ** 2
    per_start = len(cols) // p.n_vertices
    if len(rows) * labels * per_start > cap_entries:
        raise TooLarge(f"split operator would hold {len(rows) * labels * per_start} entries")
    members = _group_by(cols.starts.astype(np.int64), p.n_vertices)
    nxt = p.step_table(k2)[rows.ends]                                    # (R, labels)
    col_idx = members[nxt].reshape(len(rows), -1)                        # (R, labels*per_start)
    row_idx = np.repeat(np.arange(len(rows)), col_idx.shape[1])
    counts = sp.csr_matrix((np.ones(row_idx.size, dtype=np.int64), (row_idx, col_idx.ravel())),
                           shape=(len(rows), len(cols)))
    counts.sum_duplicates()
    return SplitOperator(k1, k2, k3, counts, labels * per_start,
                         rows.starts, rows.ends, cols.starts, cols.ends, p)


def reverse_split_matrix(split: SplitOperator):
    """The prefix-given-suffix operator R^{W[k2+1,k3]} <- R^{W[k1,k2]}."""
    p = split.product
    return split.counts.T.tocsr().astype(float) / p.d2 ** (2 * (split.k2 - split.k1 + 1))


def weighted_inner(f: np.ndarray, g: np.ndarray) -> float:
    return float(np.mean(f * g))


def split_singular_values(split: SplitOperator, count: int = 2, cap: int = DIM_CAP) -> np.ndarray:
    return singular_values(split.balanced_matrix(), count, cap)


def split_sigma2(split: SplitOperator, cap: int = DIM_CAP) -> float:
    return float(split_singular_values(split, 2, cap)[1])


def symmetrized_operator(split: SplitOperator) -> np.ndarray:
    """[[0, S], [S*, 0]] in balanced coordinates (a symmetric matrix)."""
    b = split.balanced_matrix()
    b = b.toarray() if sp.issparse(b) else b
    r, c = b.shape
    out = np.zeros((r + c, r + c))
    out[:r, r:] = b
    out[r:, :r] = b.T
    return out


def verify_tensor_structure(split: SplitOperator) -> bool:
    """Sorted by (row end, column start), the counts equal step_counts(k2) (x) ones(R, B)."""
    p = split.product
    n = p.n_vertices
    rows, cols = split.shape
    if rows % n or cols % n:
        return False
    r_block, c_block = rows // n, cols // n
    if split.denominator != p.d2 ** 2 * c_block:
        return False
    row_order = np.argsort(split.row_ends, kind="stable")
    col_order = np.argsort(split.col_starts, kind="stable")
    if not (np.array_equal(split.row_ends[row_order], np.repeat(np.arange(n), r_block))
            and np.array_equal(split.col_starts[col_order], np.repeat(np.arange(n), c_block))):
        return False
    permuted = split.counts[row_order][:, col_order]
    expected = sp.kron(step_counts(p, split.k2), np.ones((r_block, c_block), dtype=np.int64), format="csr")
    diff = (permuted - expected).tocsr()
    diff.eliminate_zeros()
    return diff.nnz == 0


def swap_operator(p: WideReplacementProduct, r: int, **caps) -> SplitOperator:
    """S_r = S[0, r, 2r+1]; rows and columns are the same walk set when r = -1 mod s."""
    if r < 0 or (r + 1) % p.s:
        raise BadResidue(f"r = {r} is not -1 mod {p.s}")
    return split_operator(p, 0, r, 2 * r + 1, **caps)


def swap_walk_collection(p: WideReplacementProduct, r: int, k: int, cap: int = WALK_CAP) -> WalkCollection:
    """k-tuples of W[0, r]-walks chained by the swap operator S_r (with label multiplicity)."""
    if r < 0 or (r + 1) % p.s:
        raise BadResidue(f"r = {r} is not -1 mod {p.s}")
    base = enumerate_walks(p, 0, r, cap)
    tuples, _ = _chain_walks(p, base.starts, base.ends, r + 1, k, cap)
    return WalkCollection(tuples, len(base), "swap", p, r + 1)


def _chain_walks(p: WideReplacementProduct, starts: np.ndarray, ends: np.ndarray, span: int,
                 arity: int, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``arity``-tuples of consecutive blocks of ``span`` product times.

    Returns (tuples of block indices, product vertex at which each chain ends).
    Ordering matches lexicographic order of the underlying product walks.
    """
    count_blocks = len(starts)
    members = _group_by(starts.astype(np.int64), p.n_vertices)
    fan = p.d2 ** 2 * members.shape[1]
    total = count_blocks * fan ** (arity - 1)
    if total > cap:
        raise TooManyWalks(f"{total} chained walks exceed the cap {cap}")
    tuples = np.arange(count_blocks, dtype=np.int64)[:, None]
    last = ends.astype(np.int64)
    for j in range(1, arity):
        nxt = p.step_table(j * span - 1)[last]                           # (m, d2^2)
        idx = members[nxt].reshape(len(tuples), -1)                      # (m, fan)
        tuples = np.concatenate([np.repeat(tuples, fan, axis=0), idx.reshape(-1, 1)], axis=1)
        last = ends[idx.ravel()].astype(np.int64)
    dtype = np.int32 if count_blocks < 2 ** 31 else np.int64
    return tuples.astype(dtype), last


# ----------------------------------------------------------------------------
# Splitting trees
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SplittingTree:
    """Binary tree over tuple positions [k1, k3]; leaves have k1 == k3."""

    k1: int
    k3: int
    k2: int | None = None
    left: "SplittingTree | None" = None
    right: "SplittingTree | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def internal_nodes(self) -> Iterator[tuple[int, int, int]]:
        if self.is_leaf:
            return
        yield (self.k1, self.k2, self.k3)
        yield from self.left.internal_nodes()
        yield from self.right.internal_nodes()

    def leaves(self) -> list[int]:
        if self.is_leaf:
            return [self.k1]
        return self.left.leaves() + self.right.leaves()

    def validate(self) -> None:
        if self.is_leaf:
            if self.k1 != self.k3:
                raise BadIndices("leaf must cover a single position")
            return
        if not (self.k1 <= self.k2 < self.k3):
            raise BadIndices(f"bad node ({self.k1}, {self.k2}, {self.k3})")
        if (self.left.k1, self.left.k3, self.right.k1, self.right.k3) != (
                self.k1, self.k2, self.k2 + 1, self.k3):
            raise BadIndices("children do not partition the parent interval")
        self.left.validate()
        self.right.validate()


def _node(k1: int, k2: int, k3: int, left: SplittingTree, right: SplittingTree) -> SplittingTree:
    return SplittingTree(k1, k3, k2, left, right)


def balanced_tree(k: int, k1: int = 0) -> SplittingTree:
    k3 = k1 + k - 1
    if k == 1:
        return SplittingTree(k1, k1)
    k2 = (k1 + k3) // 2
    return _node(k1, k2, k3, balanced_tree(k2 - k1 + 1, k1), balanced_tree(k3 - k2, k2 + 1))


def left_linear_tree(k: int) -> SplittingTree:
    tree = SplittingTree(0, 0)
    for j in range(1, k):
        tree = _node(0, j - 1, j, tree, SplittingTree(j, j))
    return tree


def all_splitting_trees(k: int, k1: int = 0) -> Iterator[SplittingTree]:
    k3 = k1 + k - 1
    if k == 1:
        yield SplittingTree(k1, k1)
        return
    for k2 in range(k1, k3):
        for left in all_splitting_trees(k2 - k1 + 1, k1):
            for right in all_splitting_trees(k3 - k2, k2 + 1):
                yield _node(k1, k2, k3, left, right)


def tree_from_text(text: str) -> SplittingTree:
    """Parse nested ``(k1,k2,k3 left right)`` or a leaf ``k``; e.g. ``(0,0,1 0 1)``."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> SplittingTree:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            return SplittingTree(int(tok), int(tok))
        k1, k2, k3 = map(int, tokens[pos].split(","))
        pos += 1
        left, right = parse(), parse()
        if tokens[pos] != ")":
            raise BadIndices("unbalanced tree text")
        pos += 1
        return _node(k1, k2, k3, left, right)

    tree = parse()
    tree.validate()
    return tree


def collection_split_operator(W: WalkCollection, node: tuple[int, int, int], **caps) -> SplitOperator:
    """Split operator of a product-walk collection at tuple positions (k1, k2, k3)."""
    if W.product is None:
        raise PreconditionError("collection has no replacement-product context")
    k1, k2, k3 = node
    b = W.block
    return split_operator(W.product, k1 * b, (k2 + 1) * b - 1, (k3 + 1) * b - 1, **caps)


def tuple_split_matrix(W: WalkCollection, node: tuple[int, int, int]):
    """Generic split operator of an arbitrary multiset of tuples, in balanced coordinates.

    Rows are distinct prefixes, columns distinct suffixes; entry = Pr[suffix | prefix].
    """
    k1, k2, k3 = node
    seg = W.tuples[:, k1:k3 + 1]
    pre, pre_idx = np.unique(seg[:, : k2 - k1 + 1], axis=0, return_inverse=True)
    suf, suf_idx = np.unique(seg[:, k2 - k1 + 1:], axis=0, return_inverse=True)
    counts = sp.csr_matrix((np.ones(len(seg)), (pre_idx.ravel(), suf_idx.ravel())), shape=(len(pre), len(suf)))
    row_mass = np.asarray(counts.sum(axis=1)).ravel()
    col_mass = np.asarray(counts.sum(axis=0)).ravel()
    # conditional operator, rescaled to the standard inner product using the marginal measures
    return sp.diags(1 / np.sqrt(row_mass)) @ counts @ sp.diags(1 / np.sqrt(col_mass))


def splittability_report(W: WalkCollection, tree: SplittingTree | None = None,
                         cap: int = DIM_CAP, **caps) -> dict:
    """sigma_2 of every internal node's split operator and their maximum tau."""
    if tree is None:
        tree = balanced_tree(W.arity)
    tree.validate()
    if tree.k1 != 0 or tree.k3 != W.arity - 1:
        raise BadIndices("tree does not cover the collection's positions")
    nodes = {}
    for node in tree.internal_nodes():
        if W.product is not None:
            nodes[node] = split_sigma2(collection_split_operator(W, node, **caps), cap)
        else:
            nodes[node] = float(singular_values(tuple_split_matrix(W, node), 2, cap)[1])
    return {"tau": max(nodes.values(), default=0.0), "nodes": nodes}


def splittability_certificate(W: WalkCollection, tree: SplittingTree | None = None, **kw) -> float:
    return splittability_report(W, tree, **kw)["tau"]


# ----------------------------------------------------------------------------
# Cascades
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CascadeLevel:
    collection: WalkCollection
    code: LinearCode
    span: int
    starts: np.ndarray
    ends: np.ndarray


@dataclass(frozen=True, eq=False)
class Cascade:
    base: LinearCode
    product: WideReplacementProduct
    top_arity: int
    levels: list[CascadeLevel] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def s(self) -> int:
        return self.product.s

    @property
    def walk_length(self) -> int:
        """t', the number of product vertices in a top-level walk."""
        return self.levels[-1].span

    def code(self, level: int) -> LinearCode:
        return self.base if level == 0 else self.levels[level - 1].code

    def ground_size(self, level: int) -> int:
        return self.code(level).block_length

    def lift(self, z, from_level: int, to_level: int) -> np.ndarray:
        z = as_word(z)
        for level in range(from_level + 1, to_level + 1):
            z = direct_sum_lift(z, self.levels[level - 1].collection)
        return z

    def encode(self, message) -> np.ndarray:
        return self.lift(self.base.encode(message), 0, self.depth)

    def positions(self, level: int) -> np.ndarray:
        """Base-code positions touched by each walk of ``level`` (rows of length span)."""
        pos = self.levels[0].collection.tuples
        for lvl in self.levels[1:level]:
            pos = pos[lvl.collection.tuples].reshape(len(lvl.collection), -1)
        return pos


def build_cascade(base: LinearCode, p: WideReplacementProduct, depth: int, top_arity: int,
                  cap: int = WALK_CAP) -> Cascade:
    """Levels 1..depth-1 chain s blocks, the top level chains ``top_arity`` blocks."""
    s = p.s
    if base.block_length != p.outer.n:
        raise LengthMismatch(f"base code length {base.block_length} != |V(G)| = {p.outer.n}")
    if depth < 1:
        raise PreconditionError("a cascade needs at least one level")
    if not s <= top_arity <= s * s:
        raise PreconditionError(f"top arity {top_arity} outside [s, s^2] = [{s}, {s * s}]")
    levels: list[CascadeLevel] = []
    code = base
    for i in range(1, depth + 1):
        arity = top_arity if i == depth else s
        if i == 1:
            if walk_count(p, 0, arity - 1) > cap:
                raise TooManyWalks(f"level 1 needs {walk_count(p, 0, arity - 1)} walks, cap is {cap}")
            space = enumerate_walks(p, 0, arity - 1, cap)
            coll = WalkCollection(space.outer_components, p.outer.n, "product", p, 1, space.vertices)
            starts, ends, span = space.starts, space.ends, arity
        else:
            prev = levels[-1]
            tuples, ends = _chain_walks(p, prev.starts, prev.ends, prev.span, arity, cap)
            coll = WalkCollection(tuples, len(prev.collection), "cascade", p, prev.span)
            starts, span = prev.starts[tuples[:, 0]], prev.span * arity
        code = lift_code(code, coll)
        levels.append(CascadeLevel(coll, code, span, starts, ends))
    return Cascade(base, p, top_arity, levels)

