"""Independent oracles used to freeze expected values in tests.

These deliberately avoid the library's closed-form implementations:
metrics are averaged over an exhaustive enumeration of the orderings
consistent with a ranking's tie structure, gradients come from central
finite differences, and stumps from brute-force threshold enumeration.
"""

import itertools
import math

import numpy as np


def _tie_groups(ranked):
    groups = []
    start = 0
    for i in range(1, len(ranked)):
        if ranked[i][1] != ranked[i - 1][1]:
            groups.append(list(range(start, i)))
            start = i
    groups.append(list(range(start, len(ranked))))
    return groups


def tie_consistent_orderings(ranked):
    """Every ordering of item ids consistent with the tie structure."""
    groups = _tie_groups(ranked)
    per_group = [itertools.permutations([ranked[i][0] for i in g]) for g in groups]
    for combo in itertools.product(*per_group):
        yield tuple(itertools.chain.from_iterable(combo))


def _plain_dcg(ids, relevant):
    return sum(1.0 / math.log2(pos + 1)
               for pos, oid in enumerate(ids, start=1) if oid in relevant)


def oracle_ndcg(ranked, relevant):
    """Mean plain nDCG over all tie-consistent orderings."""
    m = sum(1 for oid, _ in ranked if oid in relevant)
    if m == 0:
        return 0.0
    idcg = sum(1.0 / math.log2(pos + 1) for pos in range(1, m + 1))
    total, count = 0.0, 0
    for ids in tie_consistent_orderings(ranked):
        total += _plain_dcg(ids, relevant) / idcg
        count += 1
    return total / count


def oracle_recall_at_k(ranked, relevant, k):
    total, count = 0.0, 0
    for ids in tie_consistent_orderings(ranked):
        total += sum(1 for oid in ids[:k] if oid in relevant) / len(relevant)
        count += 1
    return total / count


def oracle_average_position(ranked, relevant):
    total, count = 0.0, 0
    for ids in tie_consistent_orderings(ranked):
        ranks = [pos for pos, oid in enumerate(ids, start=1) if oid in relevant]
        total += sum(ranks) / len(ranks)
        count += 1
    return total / count


def finite_difference_gradient(fn, x, h=1e-6):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, float)
    grad = np.zeros_like(x)
    for i in range(len(x)):
        up = x.copy(); up[i] += h
        down = x.copy(); down[i] -= h
        grad[i] = (fn(up) - fn(down)) / (2 * h)
    return grad


def best_stump_by_enumeration(x, y, weights):
    """Brute-force the weighted-error-minimizing stump on 1-D data.

    Returns (threshold, sign, error) where the stump predicts sign for
    values above the threshold.  Thresholds are midpoints of consecutive
    distinct sorted values; ties prefer the smallest threshold, then
    sign +1.
    """
    xs = np.sort(np.unique(x))
    best = None
    for lo, hi in zip(xs[:-1], xs[1:]):
        theta = (lo + hi) / 2.0
        for sign in (1, -1):
            pred = np.where(x > theta, sign, -sign)
            err = float(np.sum(weights[pred != y]))
            key = (err, theta, -sign)
            if best is None or key < best[0]:
                best = (key, theta, sign, err)
    return best[1], best[2], best[3]
