"""Singular values, tensor products and the entropy potential.

Operators are plain numpy arrays or scipy sparse matrices.  Small matrices go
through a dense SVD; larger ones through a block power iteration on A^T A.
The dimension cap applies to the smaller side, which sets the cost of both
paths; wide split operators with few rows stay cheap.
"""
from __future__ import annotations

import logging
import math

import numpy as np
import scipy.sparse as sp

from .errors import MissingMarginal, TooLarge

log = logging.getLogger(__name__)

DIM_CAP = 4096
DENSE_LIMIT = 512
DENSE_ENTRIES = 1 << 24
SVD_TOL = 1e-9
MAX_ITERATIONS = 100_000


def _check(op, cap):
    if min(op.shape) > cap:
        raise TooLarge(f"operator of shape {op.shape} exceeds the cap {cap}")


def _dense_singular_values(op) -> np.ndarray:
    a = op.toarray() if sp.issparse(op) else np.asarray(op, dtype=float)
    return np.linalg.svd(a, compute_uv=False)


def _block_power_singular_values(op, count: int, block: int = 8, seed: int = 0,
                                 tol: float = 1e-12) -> np.ndarray | None:
    """Top ``count`` singular values via subspace iteration on A^T A.

    Returns ``None`` if the Ritz residuals do not settle within the iteration cap.
    """
    n = op.shape[1]
    block = min(max(block, count + 2), n)
    rng = np.random.default_rng(seed)
    x, _ = np.linalg.qr(rng.standard_normal((n, block)))
    for it in range(MAX_ITERATIONS):
        ax = op @ x
        gram = ax.T @ ax
        vals, vecs = np.linalg.eigh(gram)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        x = x @ vecs
        ax = ax @ vecs
        y = op.T @ ax
        resid = np.linalg.norm(y[:, :count] - x[:, :count] * vals[:count], axis=0)
        if it > 2 and np.all(resid <= tol):
            return np.sqrt(np.clip(vals[:count], 0.0, None))
        x, _ = np.linalg.qr(y)
    return None


def singular_values(op, count: int = 2, cap: int = DIM_CAP) -> np.ndarray:
    """The ``count`` largest singular values (zero-padded)."""
    _check(op, cap)
    if op.shape[0] < op.shape[1]:
        op = op.T
    small = min(op.shape) <= DENSE_LIMIT or min(op.shape) <= count + 2
    if small and op.shape[0] * op.shape[1] <= DENSE_ENTRIES:
        vals = _dense_singular_values(op)
    else:
        vals = _block_power_singular_values(op, count)
        if vals is None and op.shape[0] * op.shape[1] > DENSE_ENTRIES:
            raise TooLarge(f"power iteration did not converge and {op.shape} is too large for a dense SVD")
        if vals is None:
            log.warning("power iteration did not converge; falling back to dense SVD")
            vals = _dense_singular_values(op)
    out = np.zeros(count)
    out[: min(count, len(vals))] = vals[:count]
    return out


def second_singular_value(op, cap: int = DIM_CAP) -> float:
    return float(singular_values(op, 2, cap)[1])


def operator_norm(op, cap: int = DIM_CAP) -> float:
    return float(singular_values(op, 1, cap)[0])


def kronecker(a, b, cap: int = DIM_CAP):
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > cap:
        raise TooLarge(f"kronecker product of shape {(rows, cols)} exceeds the cap {cap}")
    if sp.issparse(a) or sp.issparse(b):
        return sp.kron(a, b, format="csr")
    return np.kron(a, b)


def is_row_stochastic(op, tol: float = 1e-12) -> bool:
    sums = np.asarray(op.sum(axis=1)).ravel()
    return bool(np.all(np.abs(sums - 1) <= tol))


def binary_entropy(p: float, base: float = 2.0) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log(p) + (1 - p) * math.log(1 - p)) / math.log(base)


def entropy_potential(ensemble, vertex_measure=None, base: float = 2.0) -> float:
    """Average over vertices of the mean entropy of the indicator events [Y_i = a].

    ``vertex_measure`` maps vertex -> probability; uniform over all variables by default.
    For a binary variable both indicators have the same entropy, so each vertex
    contributes H(Pr[Y_i = 1]).
    """
    if vertex_measure is None:
        vertex_measure = {i: 1.0 / ensemble.n for i in range(ensemble.n)}
    total = 0.0
    for v, weight in vertex_measure.items():
        if weight == 0:
            continue
        if not 0 <= v < ensemble.n:
            raise MissingMarginal(f"no marginal for vertex {v}")
        p1 = float(ensemble.marginal(v))
        total += weight * 0.5 * (binary_entropy(p1, base) + binary_entropy(1 - p1, base))
    return total


def write_operator(op, stream) -> None:
    a = op.toarray() if sp.issparse(op) else np.asarray(op)
    stream.write(f"op {a.shape[0]} {a.shape[1]}\n")
    for row in a:
        stream.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_operator(stream) -> np.ndarray:
    header = stream.readline().split()
    if len(header) != 3 or header[0] != "op":
        raise ValueError("operator dump must start with 'op <rows> <cols>'")
    rows, cols = int(header[1]), int(header[2])
    data = np.loadtxt(stream, ndmin=2) if rows else np.zeros((0, cols))
    if data.shape != (rows, cols):
        raise ValueError(f"expected {rows}x{cols} entries, found {data.shape}")
    return data
