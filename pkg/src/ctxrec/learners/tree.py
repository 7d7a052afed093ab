"""C4.5-style decision tree for binary labels on numeric features.

Splits are placed at midpoints between consecutive distinct values of a
feature and chosen by gain ratio (information gain over split info),
considering only candidates with at least the average information gain.
Growth stops at pure nodes, nodes under two rows, and nodes without any
candidate cut.  An impure node whose candidates all have zero gain still
splits on the first cut: greedy gain cannot see parity structure (two
features whose exclusive-or is the label gain nothing individually), and
the child splits then separate it.  After growth the tree is pruned
bottom-up by comparing
each subtree's pessimistic error against the error of collapsing it to a
leaf; the pessimistic error is n times the upper confidence bound of the
binomial error rate at the configured confidence level.

Leaves predict the Laplace-smoothed positive frequency (n_pos+1)/(n+2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaincinv

from .. import _kernels


@dataclass
class TreeNode:
    n: int
    n_pos: int
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"n": self.n, "n_pos": self.n_pos}
        return {
            "n": self.n,
            "n_pos": self.n_pos,
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }


def upper_error_bound(errors: int, n: int, confidence: float) -> float:
    """Upper confidence limit of the binomial error rate (C4.5 pessimistic bound).

    Solves P(X <= errors | n, p) = confidence for p; for errors == 0 this
    reduces to 1 - confidence**(1/n).
    """
    if n <= 0:
        return 0.0
    if errors >= n:
        return 1.0
    return float(betaincinv(errors + 1, n - errors, 1.0 - confidence))


@dataclass
class J48Model:
    root: TreeNode
    columns: list[str]
    prune_confidence: float
    kind: str = "j48"
    degenerate: bool = False

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, float)
        out = np.empty(len(X))
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = (node.n_pos + 1) / (node.n + 2)
        return out

    def split_sequence(self) -> list[int]:
        """Pre-order sequence of split features (structure fingerprint)."""
        seq: list[int] = []

        def walk(node: TreeNode) -> None:
            if node.is_leaf:
                return
            seq.append(node.feature)
            walk(node.left)
            walk(node.right)

        walk(self.root)
        return seq

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "columns": list(self.columns),
            "prune_confidence": self.prune_confidence,
            "tree": self.root.to_dict(),
            "degenerate": self.degenerate,
        }


def _grow(X: np.ndarray, y: np.ndarray, idx: np.ndarray, min_split: int,
          min_leaf: int) -> TreeNode:
    n = len(idx)
    n_pos = int(y[idx].sum())
    node = TreeNode(n=n, n_pos=n_pos)
    if n < min_split or n_pos == 0 or n_pos == n:
        return node

    best_ratio = -np.inf
    best = None
    for j in range(X.shape[1]):
        vals = X[idx, j]
        order = np.argsort(vals, kind="stable")
        split_idx, gain, ratio = _kernels.best_split(vals[order], y[idx][order],
                                                     min_leaf)
        if split_idx >= 0 and ratio > best_ratio:
            best_ratio = ratio
            best = (j, order, split_idx)
    if best is None:
        return node

    j, order, split_idx = best
    svals = X[idx, j][order]
    node.feature = j
    node.threshold = float((svals[split_idx] + svals[split_idx + 1]) / 2.0)
    left_idx = idx[order[: split_idx + 1]]
    right_idx = idx[order[split_idx + 1:]]
    node.left = _grow(X, y, left_idx, min_split, min_leaf)
    node.right = _grow(X, y, right_idx, min_split, min_leaf)
    return node


def _prune(node: TreeNode, confidence: float) -> float:
    """Bottom-up subtree replacement; returns the node's pessimistic error count."""
    leaf_errors = min(node.n_pos, node.n - node.n_pos)
    as_leaf = node.n * upper_error_bound(leaf_errors, node.n, confidence)
    if node.is_leaf:
        return as_leaf
    subtree = _prune(node.left, confidence) + _prune(node.right, confidence)
    if as_leaf <= subtree + 1e-9:
        node.feature = -1
        node.left = None
        node.right = None
        return as_leaf
    return subtree


def fit_j48(X: np.ndarray, y: np.ndarray, columns: list[str],
            prune_confidence: float = 0.25, min_split: int = 2,
            min_leaf: int = 1) -> J48Model:
    """Grow and prune a tree on 0/1 labels."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    idx = np.arange(len(y))
    root = _grow(X, y, idx, min_split, min_leaf)
    if 0.0 < prune_confidence <= 1.0:
        _prune(root, prune_confidence)
    return J48Model(root=root, columns=columns, prune_confidence=prune_confidence)
