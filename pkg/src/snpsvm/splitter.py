"""Recursive hyperplane splitting of cohorts that a single SVM cannot separate.

Each impure group is split by a linear SVM (decision value >= 0 goes left)
until every group is dominated by one label at the purity threshold, or a
stop condition fires.  Leaves are summarized by the mean and population
standard deviation of their majority-labelled members.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import UsageError
from .svm import SvmConfig, SvmModel, decision_values, train


class LeafStatus(str, enum.Enum):
    PURE_ENOUGH = "pure_enough"
    TOO_SMALL = "too_small"
    UNSPLITTABLE = "unsplittable"
    DEPTH_CAPPED = "depth_capped"


@dataclass(frozen=True)
class SplitConfig:
    purity_threshold: float = 0.8
    min_group_size: int = 3
    max_depth: int = 16
    svm: SvmConfig = field(default_factory=SvmConfig)

    def __post_init__(self):
        if not 0.5 < self.purity_threshold <= 1.0:
            raise UsageError(f"purity threshold must lie in (0.5, 1], got {self.purity_threshold}")
        if self.min_group_size < 1:
            raise UsageError("min_group_size must be positive")
        if self.max_depth < 1:
            raise UsageError("max_depth must be positive")


@dataclass(frozen=True, eq=False)
class SubgroupSummary:
    center: np.ndarray
    stdevs: np.ndarray
    radius: float
    max_member_distance: float


@dataclass(frozen=True, eq=False)
class Leaf:
    indices: tuple
    majority_label: int
    purity: float
    status: LeafStatus
    summary: SubgroupSummary

    @property
    def center(self):
        return self.summary.center

    @property
    def radius(self):
        return self.summary.radius


@dataclass(frozen=True, eq=False)
class Node:
    model: SvmModel
    left: "SplitTree"
    right: "SplitTree"


SplitTree = Union[Node, Leaf]


def purity(labels) -> tuple:
    """Majority label and its share; an even split counts as +1 at 0.5."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise UsageError("purity of an empty group")
    pos = int(np.count_nonzero(labels > 0))
    neg = labels.size - pos
    if pos >= neg:
        return 1, pos / labels.size
    return -1, neg / labels.size


def summarize(X, y, majority_label: int) -> SubgroupSummary:
    X = np.asarray(X, dtype=np.float64)
    members = X[np.asarray(y) == majority_label]
    if len(members) == 0:
        raise UsageError(f"no member carries the majority label {majority_label}")
    center = members.mean(axis=0)
    stdevs = members.std(axis=0)
    distances = np.linalg.norm(members - center, axis=1)
    return SubgroupSummary(center, stdevs, float(np.linalg.norm(stdevs)), float(distances.max()))


def node_seed(root_seed: int, path: str) -> int:
    """Seed for the node reached by ``path`` ('L'/'R' steps from the root)."""
    bits = [1] + [1 if step == "R" else 0 for step in path]
    return int(np.random.SeedSequence([root_seed, *bits]).generate_state(1)[0])


def split_recursive(X, y, config: SplitConfig = SplitConfig()) -> SplitTree:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0:
        raise UsageError("cannot split an empty cohort")
    if X.ndim != 2 or len(y) != len(X):
        raise UsageError(f"{len(y)} labels for feature matrix of shape {X.shape}")
    return _grow(X, y, np.arange(len(X)), config, depth=0, path="")


def _leaf(X, y, idx, status):
    label, share = purity(y[idx])
    return Leaf(tuple(int(i) for i in idx), label, share, status, summarize(X[idx], y[idx], label))


def _grow(X, y, idx, config, depth, path):
    _, share = purity(y[idx])
    if share >= config.purity_threshold:
        return _leaf(X, y, idx, LeafStatus.PURE_ENOUGH)
    if len(idx) < config.min_group_size:
        return _leaf(X, y, idx, LeafStatus.TOO_SMALL)
    if depth >= config.max_depth:
        return _leaf(X, y, idx, LeafStatus.DEPTH_CAPPED)
    svm_config = SvmConfig(config.svm.C, config.svm.kkt_tolerance, config.svm.max_passes,
                           node_seed(config.svm.seed, path))
    model, _ = train(X[idx], y[idx], svm_config)
    goes_left = decision_values(model, X[idx]) >= 0
    if goes_left.all() or not goes_left.any():
        return _leaf(X, y, idx, LeafStatus.UNSPLITTABLE)
    return Node(
        model,
        _grow(X, y, idx[goes_left], config, depth + 1, path + "L"),
        _grow(X, y, idx[~goes_left], config, depth + 1, path + "R"),
    )


def route(tree: SplitTree, x) -> Leaf:
    """The leaf reached by following decision-value signs from the root."""
    x = np.asarray(x, dtype=np.float64)
    node = tree
    while isinstance(node, Node):
        node = node.left if decision_values(node.model, x[None, :])[0] >= 0 else node.right
    return node


def classify_by_tree(tree: SplitTree, x) -> tuple:
    """Route ``x`` down the tree; returns (label, leaf purity, distance to leaf center)."""
    x = np.asarray(x, dtype=np.float64)
    node = route(tree, x)
    if x.shape != node.center.shape:
        raise UsageError(f"expected a vector of dimension {len(node.center)}, got shape {x.shape}")
    return node.majority_label, node.purity, float(np.linalg.norm(x - node.center))


def leaves(tree: SplitTree) -> list:
    """Leaves in left-to-right order."""
    if isinstance(tree, Leaf):
        return [tree]
    return leaves(tree.left) + leaves(tree.right)


def depth(tree: SplitTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(depth(tree.left), depth(tree.right))
