"""Feature-hashed bag-of-words text vectorizer.

Lowercases, tokenizes on alphanumeric runs, hashes unigrams and
bigrams into a fixed number of buckets (64-bit FNV-1a mod hash_dim)
and L2-normalizes the bucket counts.  Deterministic for fixed text and
hash_dim on any machine; no vocabulary is stored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyTextError

DEFAULT_HASH_DIM = 1 << 18

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric tokens in order of appearance."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class SparseFeatures:
    """Hashed text features: sorted unique bucket indices with L2-normalized
    weights."""

    indices: np.ndarray  # int64, strictly increasing, < hash_dim
    weights: np.ndarray  # float64, unit L2 norm
    hash_dim: int

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.hash_dim)
        dense[self.indices] = self.weights
        return dense


def featurize(text: str, hash_dim: int = DEFAULT_HASH_DIM) -> SparseFeatures:
    """Hash a text into normalized sparse features.

    Raises EmptyTextError when the text contains no tokens.
    """
    tokens = tokenize(text)
    if not tokens:
        raise EmptyTextError("no tokens in text")
    buckets = kernels.hash_ngrams(tokens, hash_dim)
    indices, counts = np.unique(buckets, return_counts=True)
    weights = counts.astype(np.float64)
    weights /= np.linalg.norm(weights)
    return SparseFeatures(indices=indices, weights=weights, hash_dim=hash_dim)


def ngram_strings(text: str) -> list[str]:
    """The exact feature strings featurize hashes, for collision audits."""
    tokens = tokenize(text)
    return tokens + [f"{a}\x1f{b}" for a, b in zip(tokens, tokens[1:])]
