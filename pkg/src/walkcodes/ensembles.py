"""Local ensembles backed by an explicit joint distribution, and rounding on them.

The brute-force ensemble is a genuine probability distribution over full
assignments, so every local marginal is consistent and every conditional
covariance matrix is PSD.  It stands in for the output of a semidefinite
relaxation at desk scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EmptyList, LocalityTooSmall, PreconditionError
from .f2 import LinearCode, as_word
from .lifting import WalkCollection, direct_sum_lift

INFINITE = math.inf


def within_list_radius(distance: Fraction, eta) -> bool:
    """Exact test of distance <= 1/2 - sqrt(eta)."""
    gap = Fraction(1, 2) - Fraction(distance)
    return gap >= 0 and gap * gap >= Fraction(eta)


@dataclass(frozen=True, eq=False)
class LocalEnsemble:
    """Distribution over assignments in {0,1}^n given by support rows and probabilities."""

    support: np.ndarray
    probs: np.ndarray
    locality: float = INFINITE

    def __post_init__(self):
        sup = np.atleast_2d(np.asarray(self.support, dtype=np.uint8))
        pr = np.asarray(self.probs, dtype=float)
        if sup.shape[0] != pr.size or sup.shape[0] == 0:
            raise PreconditionError("support and probabilities must be non-empty and aligned")
        if np.any(pr < 0) or abs(pr.sum() - 1) > 1e-9:
            raise PreconditionError("probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "probs", pr / pr.sum())

    @property
    def n(self) -> int:
        return self.support.shape[1]

    def _check_locality(self, size: int):
        if size > self.locality:
            raise LocalityTooSmall(f"query on {size} variables exceeds locality {self.locality}")

    def marginal(self, i: int) -> float:
        """Pr[Z_i = 1]."""
        return float(self.probs @ self.support[:, i])

    def marginals(self) -> np.ndarray:
        return self.probs @ self.support

    def joint(self, variables) -> dict[tuple[int, ...], float]:
        """Distribution of (Z_v for v in variables); repeated variables agree, so
        implausible assignments never appear."""
        variables = list(variables)
        self._check_locality(len(set(variables)))
        out: dict[tuple[int, ...], float] = {}
        for row, p in zip(self.support[:, variables], self.probs):
            if p:
                key = tuple(int(b) for b in row)
                out[key] = out.get(key, 0.0) + float(p)
        return out

    def probability(self, variables, assignment) -> float:
        return self.joint(variables).get(tuple(int(b) for b in assignment), 0.0)

    def condition(self, variables, assignment) -> "LocalEnsemble":
        variables = list(variables)
        self._check_locality(len(set(variables)))
        assignment = np.asarray(assignment, dtype=np.uint8)
        keep = np.all(self.support[:, variables] == assignment, axis=1) & (self.probs > 0)
        if not keep.any():
            raise PreconditionError("conditioning on an assignment of probability zero")
        probs = self.probs[keep]
        return LocalEnsemble(self.support[keep], probs / probs.sum(), self.locality - len(set(variables)))

    def covariance(self, variables=None) -> np.ndarray:
        variables = range(self.n) if variables is None else list(variables)
        x = self.support[:, list(variables)].astype(float)
        mean = self.probs @ x
        centred = x - mean
        return (centred * self.probs[:, None]).T @ centred

    def cloud_view(self, cloud_size: int) -> "LocalEnsemble":
        """Ensemble on product vertices (v, h) with Y_(v,h) = Z_v."""
        return LocalEnsemble(np.repeat(self.support, cloud_size, axis=1), self.probs, self.locality)


def point_mass(z) -> LocalEnsemble:
    return LocalEnsemble(as_word(z)[None, :], [1.0])


def uniform_over(words, locality: float = INFINITE) -> LocalEnsemble:
    words = np.array([as_word(w) for w in words])
    return LocalEnsemble(words, np.full(len(words), 1.0 / len(words)), locality)


def product_ensemble(p1) -> LocalEnsemble:
    """Independent bits with Pr[Z_i = 1] = p1[i] (explicit support of size 2^n)."""
    p1 = np.asarray(p1, dtype=float)
    n = p1.size
    support = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    probs = np.prod(np.where(support == 1, p1, 1 - p1), axis=1)
    return LocalEnsemble(support, probs)


def brute_force_ensemble(code: LinearCode, received, eta, W: WalkCollection,
                         locality: float = INFINITE) -> LocalEnsemble:
    """Uniform distribution over codewords whose lift lies within 1/2 - sqrt(eta) of ``received``."""
    received = as_word(received)
    words = code.codewords()
    keep = [z for z in words
            if within_list_radius(Fraction(int(np.count_nonzero(direct_sum_lift(z, W) != received)),
                                           received.size), eta)]
    if not keep:
        raise EmptyList("no codeword lifts within the list-decoding radius")
    return uniform_over(keep, locality)


def _sample_assignment(ens: LocalEnsemble, variables, rng) -> np.ndarray:
    row = rng.choice(len(ens.probs), p=ens.probs)
    return ens.support[row, variables]


def propagation_rounding(ens: LocalEnsemble, W: WalkCollection, L: int, seed: int,
                         m: int | None = None) -> tuple[np.ndarray, LocalEnsemble]:
    """Condition on the values of a few random walks, then round every bit independently.

    ``m`` forces the number of sampled walks (otherwise uniform in 1..L//k).
    """
    k = W.arity
    if L < k:
        raise LocalityTooSmall(f"L = {L} is smaller than the arity {k}")
    if ens.locality < L + 2 * k:
        raise LocalityTooSmall(f"ensemble locality {ens.locality} < L + 2k = {L + 2 * k}")
    rng = np.random.default_rng(seed)
    if m is None:
        m = int(rng.integers(1, L // k + 1))
    picks = rng.integers(0, len(W), size=m)
    variables = np.unique(W.tuples[picks].ravel())
    sigma = _sample_assignment(ens, variables, rng)
    conditioned = ens.condition(variables, sigma)
    bits = (rng.random(ens.n) < conditioned.marginals()).astype(np.uint8)
    return bits, conditioned


def majority_vote(ens: LocalEnsemble) -> np.ndarray:
    """Per-variable most likely bit; ties go to 0."""
    return (ens.marginals() > 0.5).astype(np.uint8)


def _joint_vector(ens: LocalEnsemble, variables) -> np.ndarray:
    """Probability vector over {0,1}^len(variables), index bit j = value of variables[j]."""
    bits = ens.support[:, list(variables)].astype(np.int64)
    idx = bits @ (1 << np.arange(len(variables)))
    return np.bincount(idx, weights=ens.probs, minlength=1 << len(variables))


def _product_vector(vectors) -> np.ndarray:
    out = np.ones(1)
    for v in vectors:
        out = np.outer(v, out).ravel()
    return out


def _single(ens: LocalEnsemble, i: int) -> np.ndarray:
    p1 = ens.marginal(i)
    return np.array([1 - p1, p1])


def tensoriality_defect(ens: LocalEnsemble, W: WalkCollection) -> float:
    """Average over tuples of || {Z_w} - {Z_w1}...{Z_wk} ||_1."""
    ens._check_locality(W.arity)
    rows, weights = np.unique(W.tuples, axis=0, return_counts=True)
    total = 0.0
    for row, c in zip(rows, weights):
        joint = _joint_vector(ens, row)
        prod = _product_vector([_single(ens, i) for i in row])
        total += c * np.abs(joint - prod).sum()
    return total / len(W)


def two_step_defect(ens: LocalEnsemble, W: WalkCollection) -> float:
    """Average over pairs of tuples of || {Z_w Z_w'} - {Z_w}{Z_w'} ||_1."""
    ens._check_locality(2 * W.arity)
    rows, weights = np.unique(W.tuples, axis=0, return_counts=True)
    singles = [_joint_vector(ens, row) for row in rows]
    total = 0.0
    for a, (ra, ca) in enumerate(zip(rows, weights)):
        for b, (rb, cb) in enumerate(zip(rows, weights)):
            joint = _joint_vector(ens, list(ra) + list(rb))
            prod = np.outer(singles[b], singles[a]).ravel()
            total += ca * cb * np.abs(joint - prod).sum()
    return total / len(W) ** 2


def split_defect(ens: LocalEnsemble, W: WalkCollection, node: tuple[int, int, int]) -> float:
    """Average of || {Z_w[k1..k3]} - {Z_w[k1..k2]}{Z_w[k2+1..k3]} ||_1."""
    k1, k2, k3 = node
    rows, weights = np.unique(W.tuples, axis=0, return_counts=True)
    total = 0.0
    for row, c in zip(rows, weights):
        left, right = list(row[k1:k2 + 1]), list(row[k2 + 1:k3 + 1])
        joint = _joint_vector(ens, left + right)
        prod = np.outer(_joint_vector(ens, right), _joint_vector(ens, left)).ravel()
        total += c * np.abs(joint - prod).sum()
    return total / len(W)
