"""Segmentation-lattice dynamic programs over subword probabilities.

A word of length n induces a DAG with one vertex per inter-character
position and one edge per substring, weighted by the substring's
probability.  Source-to-sink paths are exactly the 2^(n-1) segmentations
of the word, and the likelihood of a segmentation is proportional to the
product of its edge weights.

Every path through a fixed edge splits into a left part, the edge, and a
right part, so the marginal mass of a subword occurrence factors into
(forward path sum) * (edge weight) * (backward path sum).  Forward and
backward sums obey a quadratic-time recursion, which gives all per-subword
weights in O(n^2) arithmetic instead of enumerating paths.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .subword_stats import SubwordTable

# A segmentation is an ordered tuple of segments whose concatenation
# restores the source word.
Segmentation = tuple[str, ...]

MAX_WORD_LEN = 1000  # the DP is cheap but unbounded input is abuse
MAX_ENUM_LEN = 20    # exhaustive enumeration is O(2^n)

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class LatticeResult:
    """Forward/backward sums and normalized subword weights for one word.

    ``forward[i]`` sums segment-probability products over all segmentations
    of ``word[:i]`` (``forward[0] == 1``); ``backward[i]`` does the same for
    ``word[i:]`` (``backward[n] == 1``).  ``partition`` is the total mass of
    all segmentations, i.e. ``forward[n]``.  ``weights`` maps each subword
    to its normalized marginal mass, accumulated over repeated occurrences,
    and sums to 1.
    """

    word: str
    forward: list[float]
    backward: list[float]
    partition: float
    weights: dict[str, float]


def _check_word(word: str, limit: int = MAX_WORD_LEN) -> None:
    if not word:
        raise ValueError("empty word")
    if len(word) > limit:
        raise ValueError(f"word of length {len(word)} exceeds the guard of {limit}")


def forward_sums(word: str, table: SubwordTable) -> list[float]:
    """Path sums over all segmentations of every prefix of ``word``."""
    _check_word(word)
    n = len(word)
    sums = [0.0] * (n + 1)
    sums[0] = 1.0
    lookup = table.lookup
    for i in range(1, n + 1):
        acc = 0.0
        for k in range(i):
            prob = lookup(word[k:i])
            if prob:
                acc += sums[k] * prob
        sums[i] = acc
    return sums


def backward_sums(word: str, table: SubwordTable) -> list[float]:
    """Mirror of :func:`forward_sums`, accumulated from the right end."""
    _check_word(word)
    n = len(word)
    sums = [0.0] * (n + 1)
    sums[n] = 1.0
    lookup = table.lookup
    for i in range(n - 1, -1, -1):
        acc = 0.0
        for j in range(i + 1, n + 1):
            prob = lookup(word[i:j])
            if prob:
                acc += prob * sums[j]
        sums[i] = acc
    return sums


def partition(word: str, table: SubwordTable) -> float:
    """Total probability mass over all segmentations of ``word``."""
    return forward_sums(word, table)[-1]


def subword_weights(word: str, table: SubwordTable) -> LatticeResult:
    """Normalized marginal weight of every subword of ``word``.

    Each occurrence of a subword at span (i, j) contributes
    ``prob * forward[i] * backward[j]``; occurrences of the same string
    accumulate under one key.  Weights are normalized to sum to 1 over all
    subwords.  Zero-probability subwords are omitted.
    """
    _check_word(word)
    n = len(word)
    forward = forward_sums(word, table)
    backward = backward_sums(word, table)
    total_mass = forward[n]
    lookup = table.lookup

    if total_mass > 0.0:
        acc: dict[str, float] = {}
        total = 0.0
        for i in range(n):
            left = forward[i]
            if left == 0.0:
                continue
            for j in range(i + 1, n + 1):
                prob = lookup(word[i:j])
                if prob == 0.0:
                    continue
                contrib = prob * left * backward[j]
                if contrib == 0.0:
                    continue
                sub = word[i:j]
                acc[sub] = acc.get(sub, 0.0) + contrib
                total += contrib
        weights = {sub: value / total for sub, value in acc.items()}
    else:
        # Products of many small probabilities underflowed; redo the sums
        # in log space and exponentiate normalized ratios only.
        weights = _log_space_weights(word, table)

    return LatticeResult(
        word=word,
        forward=forward,
        backward=backward,
        partition=total_mass,
        weights=weights,
    )


def segmentation_likelihood(
    word: str, seg: Segmentation, table: SubwordTable
) -> float:
    """Probability of one segmentation among all segmentations of ``word``."""
    _check_word(word)
    if not seg or any(not s for s in seg) or "".join(seg) != word:
        raise ValueError(f"segmentation {seg!r} does not spell {word!r}")
    product = 1.0
    for segment in seg:
        product *= table.lookup(segment)
    norm = partition(word, table)
    if norm > 0.0:
        return product / norm
    # Underflowed partition: fall back to log space (a -inf term from a
    # zero-probability segment correctly yields likelihood 0).
    log_product = sum(_log_lookup(table, segment) for segment in seg)
    log_norm = _log_forward_sums(word, table)[len(word)]
    return math.exp(log_product - log_norm)


def top_k_segmentations(
    word: str, table: SubwordTable, k: int
) -> list[tuple[Segmentation, float]]:
    """The ``k`` most likely segmentations, exactly, in descending order.

    Ties are broken by fewer segments, then lexicographic segment order.
    Implemented as best-first search over the lattice; the search key
    (-log probability, segment count, segments) never improves along an
    extension, so paths pop in exact global order.  Likelihoods are
    normalized by the partition value.
    """
    _check_word(word)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(word)
    log_norm = _log_forward_sums(word, table)[n]

    # heap entries: (-log product, segment count, segments, node)
    heap: list[tuple[float, int, Segmentation, int]] = [(0.0, 0, (), 0)]
    out: list[tuple[Segmentation, float]] = []
    while heap and len(out) < k:
        neg_log, count, segments, node = heapq.heappop(heap)
        if node == n:
            out.append((segments, math.exp(-neg_log - log_norm)))
            continue
        for j in range(node + 1, n + 1):
            log_prob = _log_lookup(table, word[node:j])
            heapq.heappush(
                heap,
                (neg_log - log_prob, count + 1, segments + (word[node:j],), j),
            )
    return out


def enumerate_all_segmentations(word: str) -> list[Segmentation]:
    """All 2^(n-1) segmentations of ``word`` (guarded to short words)."""
    _check_word(word, limit=MAX_ENUM_LEN)
    n = len(word)
    out: list[Segmentation] = []

    def extend(start: int, acc: Segmentation) -> None:
        if start == n:
            out.append(acc)
            return
        for j in range(start + 1, n + 1):
            extend(j, acc + (word[start:j],))

    extend(0, ())
    return out


def _log_lookup(table: SubwordTable, subword: str) -> float:
    prob = table.lookup(subword)
    return math.log(prob) if prob > 0.0 else _NEG_INF


def _logaddexp(a: float, b: float) -> float:
    if a == _NEG_INF:
        return b
    if b == _NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def _log_forward_sums(word: str, table: SubwordTable) -> list[float]:
    n = len(word)
    sums = [_NEG_INF] * (n + 1)
    sums[0] = 0.0
    for i in range(1, n + 1):
        acc = _NEG_INF
        for k in range(i):
            log_prob = _log_lookup(table, word[k:i])
            if log_prob != _NEG_INF and sums[k] != _NEG_INF:
                acc = _logaddexp(acc, sums[k] + log_prob)
        sums[i] = acc
    return sums


def _log_backward_sums(word: str, table: SubwordTable) -> list[float]:
    n = len(word)
    sums = [_NEG_INF] * (n + 1)
    sums[n] = 0.0
    for i in range(n - 1, -1, -1):
        acc = _NEG_INF
        for j in range(i + 1, n + 1):
            log_prob = _log_lookup(table, word[i:j])
            if log_prob != _NEG_INF and sums[j] != _NEG_INF:
                acc = _logaddexp(acc, log_prob + sums[j])
        sums[i] = acc
    return sums


def _log_space_weights(word: str, table: SubwordTable) -> dict[str, float]:
    n = len(word)
    forward = _log_forward_sums(word, table)
    backward = _log_backward_sums(word, table)
    acc: dict[str, float] = {}
    total = _NEG_INF
    for i in range(n):
        if forward[i] == _NEG_INF:
            continue
        for j in range(i + 1, n + 1):
            log_prob = _log_lookup(table, word[i:j])
            if log_prob == _NEG_INF or backward[j] == _NEG_INF:
                continue
            contrib = log_prob + forward[i] + backward[j]
            sub = word[i:j]
            prev = acc.get(sub)
            acc[sub] = contrib if prev is None else _logaddexp(prev, contrib)
            total = _logaddexp(total, contrib)
    return {sub: math.exp(value - total) for sub, value in acc.items()}
