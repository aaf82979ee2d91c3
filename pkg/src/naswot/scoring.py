"""Hamming-kernel log-determinant scoring of untrained networks.

Given the binary activation codes c_1..c_N of a batch (one code per
input, N_A bits each), the kernel entry K[i, j] = N_A - d_H(c_i, c_j)
counts the bits on which codes i and j agree.  The score of a network
is ln det K.  K is positive semidefinite (it is C C^T + (1-C)(1-C)^T
for the 0/1 code matrix C), so the determinant is non-negative; it is
zero exactly when two inputs share a code or the codes are otherwise
linearly dependent, and such batches are flagged SINGULAR rather than
given a numeric score.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .network import ActivationCodeMatrix, NetworkConfig, NonFiniteActivation, build_network, forward_collect_codes
from .searchspace import Genotype

__all__ = [
    "ScoreStatus",
    "Score",
    "HammingKernel",
    "ZeroDiagonal",
    "hamming_kernel",
    "normalize_kernel",
    "logdet_score",
    "score_network",
    "make_scorer",
]


class ScoreStatus(enum.Enum):
    VALID = "valid"
    SINGULAR = "singular"
    NON_FINITE = "non_finite"


@functools.total_ordering
@dataclass(frozen=True)
class Score:
    """A network score with its validity status.

    Invalid scores (singular kernel, non-finite activations) carry
    value -inf purely as an ordering sentinel; they compare below every
    valid score and must not be used in arithmetic.  Ordering among
    invalid scores is by status name, so sorting is total and stable.
    """

    value: float
    status: ScoreStatus = ScoreStatus.VALID

    @classmethod
    def invalid(cls, status: ScoreStatus) -> "Score":
        return cls(value=-np.inf, status=status)

    @property
    def is_valid(self) -> bool:
        return self.status is ScoreStatus.VALID

    def _key(self) -> tuple:
        # valid scores rank above any invalid one; ties among invalid
        # ones break on the status name for determinism
        return (self.is_valid, self.value if self.is_valid else 0.0, self.status.value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Score):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other) -> bool:
        if not isinstance(other, Score):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())


@dataclass(frozen=True)
class HammingKernel:
    """The N x N agreement-count kernel of a code matrix, with N_A."""

    matrix: np.ndarray  # (N, N) float64
    n_units: int


class ZeroDiagonal(ValueError):
    """Kernel normalization hit a zero diagonal entry."""


def hamming_kernel(codes: ActivationCodeMatrix) -> HammingKernel:
    """K[i, j] = n_units - popcount(code_i XOR code_j), as float64.

    Works on the packed words directly: one XOR + bit count per row
    pair, 64 code bits per word operation.
    """
    words = codes.words
    n = words.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        dist = np.bitwise_count(words[i] ^ words).sum(axis=1)
        out[i] = codes.n_units - dist
    return HammingKernel(matrix=out, n_units=codes.n_units)


def normalize_kernel(kernel: HammingKernel) -> np.ndarray:
    """Rescale to unit diagonal: K[i,j] / sqrt(K[i,i] K[j,j])."""
    diag = np.diag(kernel.matrix)
    if np.any(diag == 0):
        raise ZeroDiagonal("kernel has a zero diagonal entry; cannot normalize")
    scale = np.sqrt(np.outer(diag, diag))
    return kernel.matrix / scale


def logdet_score(kernel: Union[HammingKernel, np.ndarray]) -> Score:
    """ln det K via Cholesky: 2 * sum(log diag(L)).

    A kernel that is numerically singular (Cholesky fails, or a factor
    diagonal underflows to zero) yields a SINGULAR score; non-finite
    kernel entries yield NON_FINITE.
    """
    matrix = kernel.matrix if isinstance(kernel, HammingKernel) else np.asarray(kernel, dtype=np.float64)
    if not np.isfinite(matrix).all():
        return Score.invalid(ScoreStatus.NON_FINITE)
    try:
        factor = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        return Score.invalid(ScoreStatus.SINGULAR)
    diag = np.diagonal(factor)
    if np.any(diag <= 0):
        return Score.invalid(ScoreStatus.SINGULAR)
    value = 2.0 * float(np.sum(np.log(diag)))
    if not np.isfinite(value):
        return Score.invalid(ScoreStatus.SINGULAR)
    return Score(value=value)


def score_network(genotype: Genotype, config: NetworkConfig, batch: np.ndarray) -> Score:
    """Build, run one batch, and score: ln det of the code Hamming kernel."""
    net = build_network(genotype, config)
    try:
        codes = forward_collect_codes(net, batch)
    except NonFiniteActivation:
        return Score.invalid(ScoreStatus.NON_FINITE)
    return logdet_score(hamming_kernel(codes))


def make_scorer(config: NetworkConfig, batch: np.ndarray) -> Callable[[Genotype], Score]:
    """Bind config and batch into a genotype -> Score callable."""

    def scorer(genotype: Genotype) -> Score:
        return score_network(genotype, config, batch)

    return scorer
