"""Mergeable first and second moments of multivariate samples.

Chunks are summarised independently and combined with the pairwise update of
Chan, Golub and LeVeque.  The combination order is fixed by ``tree_reduce`` so
a set of chunk summaries always reduces to the same bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class Moments:
    """Count, mean vector and co-moment matrix (sum of centred outer products)."""

    n: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def empty(cls, dim: int) -> "Moments":
        return cls(0, np.zeros(dim), np.zeros((dim, dim)))

    @classmethod
    def from_samples(cls, x: np.ndarray) -> "Moments":
        """Two-pass summary of an ``(n, dim)`` array."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError("expected a 2-D array of samples")
        mean = x.mean(axis=0)
        xc = x - mean
        return cls(x.shape[0], mean, xc.T @ xc)

    def merge(self, other: "Moments") -> "Moments":
        if other.n == 0:
            return Moments(self.n, self.mean.copy(), self.m2.copy())
        if self.n == 0:
            return Moments(other.n, other.mean.copy(), other.m2.copy())
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + np.outer(delta, delta) * (self.n * other.n / n)
        return Moments(n, mean, m2)

    def cov(self, ddof: int = 1) -> np.ndarray:
        return self.m2 / (self.n - ddof)

    def var(self, ddof: int = 1) -> np.ndarray:
        return np.diag(self.m2) / (self.n - ddof)


def tree_reduce(parts: Sequence[Moments]) -> Moments:
    """Merge summaries pairwise, level by level, in index order."""
    level = list(parts)
    if not level:
        raise ValueError("nothing to reduce")
    while len(level) > 1:
        nxt = [level[i].merge(level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]
