"""Bayesian decision trees over binned features.

One tree per non-root DAG node models P(node | parents). Leaves carry dual
statistics: a Dirichlet posterior over the node's own bins (forward
prediction) and per-class histograms of each parent's bins (backward
sampling of parents given a realized output). Splits are chosen by the
hybrid criterion scored in :mod:`dagsynth.kernels`; a split is accepted
only when its score beats the node's own no-split marginal likelihood,
which is what keeps trees small on unstructured data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dag import CausalDag
from .discretize import BinnedDataset
from .errors import MissingParentValueError, NodeHasNoDataError
from .kernels import dm_log_marginal, scan_splits

POINT_ESTIMATE_EPS = 1e-9


@dataclass
class Hyperparams:
    lambda_unsup: float = 0.5
    lambda_div: float = 0.1
    min_samples_leaf: int = 10
    max_depth: int = 12
    alpha_prior: float = 1.0
    backward_smoothing: float = 0.1
    point_estimate_leaves: bool = False

    def to_obj(self) -> dict:
        return {
            "lambda_unsup": self.lambda_unsup,
            "lambda_div": self.lambda_div,
            "min_samples_leaf": self.min_samples_leaf,
            "max_depth": self.max_depth,
            "alpha_prior": self.alpha_prior,
            "backward_smoothing": self.backward_smoothing,
            "point_estimate_leaves": self.point_estimate_leaves,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "Hyperparams":
        return cls(**obj)


@dataclass
class LeafStats:
    """Sufficient statistics of one leaf.

    ``counts`` are the raw class counts (the Dirichlet posterior is
    ``alpha_prior + counts``); ``parent_hists[j]`` is the marginal histogram
    of parent j's bins among rows routed here, and ``class_parent[c][j]``
    the same histogram restricted to rows with output class c. Classes
    absent from the leaf are simply missing from ``class_parent``.
    """

    counts: np.ndarray                       # (k_out,) int64
    parent_hists: list[np.ndarray]           # per parent, (k_j,) int64
    class_parent: dict[int, list[np.ndarray]]
    n_leaf: int
    leaf_weight: float
    leaf_id: int = -1


@dataclass
class TreeSplit:
    feat_pos: int      # position within the tree's parent list
    split_bin: int     # parent bins <= split_bin route left
    left: "TreeSplit | TreeLeaf"
    right: "TreeSplit | TreeLeaf"


@dataclass
class TreeLeaf:
    stats: LeafStats


@dataclass
class TreeModel:
    node_index: int
    parent_indices: list[int]                # global column indices
    k_out: int
    k_parents: list[int]
    root: TreeSplit | TreeLeaf
    hp: Hyperparams
    leaves: list[LeafStats] = field(default_factory=list)
    # stacked per-leaf arrays, built by _finalize
    leaf_alpha: np.ndarray = None
    leaf_weights: np.ndarray = None
    leaf_counts: np.ndarray = None
    marginal_predictive: np.ndarray = None

    def _finalize(self):
        self.leaves = []

        def collect(node):
            if isinstance(node, TreeLeaf):
                node.stats.leaf_id = len(self.leaves)
                self.leaves.append(node.stats)
            else:
                collect(node.left)
                collect(node.right)

        collect(self.root)
        prior = POINT_ESTIMATE_EPS if self.hp.point_estimate_leaves else self.hp.alpha_prior
        self.leaf_counts = np.stack([lf.counts for lf in self.leaves]).astype(np.float64)
        self.leaf_alpha = self.leaf_counts + prior
        self.leaf_weights = np.array([lf.leaf_weight for lf in self.leaves])
        pred = self.leaf_alpha / self.leaf_alpha.sum(axis=1, keepdims=True)
        self.marginal_predictive = self.leaf_weights @ pred
        return self

    # --- queries ---

    def route(self, row_bins) -> int:
        """Leaf id reached by a full row's bins (indexed by global feature)."""
        node = self.root
        while isinstance(node, TreeSplit):
            gj = self.parent_indices[node.feat_pos]
            b = row_bins[gj]
            if b is None:
                raise MissingParentValueError(
                    f"parent column {gj} unset while routing tree for node {self.node_index}")
            node = node.left if b <= node.split_bin else node.right
        return node.stats.leaf_id

    def alpha_at(self, leaf_id: int) -> np.ndarray:
        return self.leaf_alpha[leaf_id]

    def predictive_at(self, leaf_id: int) -> np.ndarray:
        a = self.leaf_alpha[leaf_id]
        return a / a.sum()

    def backward_hist(self, leaf_id: int, realized_bin: int, feat_pos: int) -> np.ndarray:
        """Smoothed histogram of one parent's bins given the realized output class.

        Falls back to the leaf's class-aggregated parent histogram when the
        class was never observed at this leaf. ``backward_smoothing`` is the
        total pseudo-mass spread across the parent's bins, so it stays small
        next to real counts regardless of the bin count.
        """
        lf = self.leaves[leaf_id]
        hists = lf.class_parent.get(int(realized_bin))
        base = hists[feat_pos] if hists is not None else lf.parent_hists[feat_pos]
        return base + self.hp.backward_smoothing / len(base)


def forward_posterior(tree: TreeModel, row_bins) -> np.ndarray:
    """Dirichlet alpha at the leaf selected by the (fully assigned) parents."""
    return tree.alpha_at(tree.route(row_bins))


def filter_leaves(tree: TreeModel, target_bins) -> tuple[np.ndarray, np.ndarray]:
    """Leaves compatible with ``target_bins`` plus normalized weights.

    A leaf qualifies if it observed any target bin in training; when no leaf
    did, every leaf with positive prior predictive mass on the target is
    returned instead. Weights are leaf_weight * P(target | leaf posterior),
    renormalized. An empty result signals infeasibility to the caller.
    """
    target = np.asarray(sorted(target_bins), dtype=np.int64)
    mass = tree.leaf_alpha[:, target].sum(axis=1) / tree.leaf_alpha.sum(axis=1)
    observed = tree.leaf_counts[:, target].sum(axis=1) > 0
    pool = observed if observed.any() else mass > 0
    if not pool.any():
        return np.empty(0, dtype=np.int64), np.empty(0)
    ids = np.nonzero(pool)[0]
    w = tree.leaf_weights[ids] * mass[ids]
    total = w.sum()
    if total <= 0:
        return np.empty(0, dtype=np.int64), np.empty(0)
    return ids, w / total


def backward_sample_parents(tree: TreeModel, leaf_ids: np.ndarray, weights: np.ndarray,
                            realized_bin: int, rng: np.random.Generator) -> dict[int, int]:
    """Draw all parents jointly at leaf granularity: pick a leaf by weight,
    then each parent independently from that leaf's class histogram."""
    from .generate import masked_sample  # local import to avoid a cycle

    if len(leaf_ids) == 0:
        from .errors import NoFeasibleLeafError
        raise NoFeasibleLeafError(f"no feasible leaf for node {tree.node_index}")
    lid = int(leaf_ids[rng.choice(len(leaf_ids), p=weights)])
    out = {}
    for pos, gj in enumerate(tree.parent_indices):
        h = tree.backward_hist(lid, realized_bin, pos)
        out[gj] = masked_sample(h, None, rng)
    return out


# --- fitting ---

def _leaf_from_rows(y, X, k_out, k_parents, n_total) -> TreeLeaf:
    counts = np.bincount(y, minlength=k_out).astype(np.int64)
    parent_hists = []
    class_parent: dict[int, list[np.ndarray]] = {}
    joints = []
    for pos, kj in enumerate(k_parents):
        joint = np.zeros((k_out, kj), dtype=np.int64)
        np.add.at(joint, (y, X[:, pos]), 1)
        joints.append(joint)
        parent_hists.append(joint.sum(axis=0))
    for c in np.nonzero(counts)[0]:
        class_parent[int(c)] = [j[c].copy() for j in joints]
    stats = LeafStats(counts=counts, parent_hists=parent_hists, class_parent=class_parent,
                      n_leaf=int(len(y)), leaf_weight=len(y) / n_total)
    return TreeLeaf(stats=stats)


def fit_tree(data: BinnedDataset, dag: CausalDag, node: int, hp: Hyperparams) -> TreeModel:
    """Fit the Bayesian decision tree for one DAG node.

    Root nodes (no parents) collapse to a single leaf holding the marginal
    posterior, which keeps every node queryable through the same interface.
    """
    n = data.n
    if n == 0:
        raise NodeHasNoDataError(f"node {node} has no training rows")
    parents = list(dag.parents[node])
    k_out = data.disc.features[node].k_eff
    k_parents = [data.disc.features[p].k_eff for p in parents]
    y = data.bins[:, node].astype(np.int64)
    X = data.bins[:, parents].astype(np.int64) if parents else np.zeros((n, 0), dtype=np.int64)
    k_arr = np.asarray(k_parents, dtype=np.int64)

    def build(idx: np.ndarray, depth: int):
        sub_y, sub_X = y[idx], X[idx]
        if (not parents or depth >= hp.max_depth
                or len(idx) < 2 * hp.min_samples_leaf):
            return _leaf_from_rows(sub_y, sub_X, k_out, k_parents, n)
        j, t, score, baseline = scan_splits(
            sub_y, sub_X, k_out, k_arr, hp.alpha_prior,
            hp.lambda_unsup, hp.lambda_div, hp.min_samples_leaf)
        if j < 0 or score <= baseline:
            return _leaf_from_rows(sub_y, sub_X, k_out, k_parents, n)
        left_mask = sub_X[:, j] <= t
        return TreeSplit(feat_pos=int(j), split_bin=int(t),
                         left=build(idx[left_mask], depth + 1),
                         right=build(idx[~left_mask], depth + 1))

    root = build(np.arange(n), 0)
    tree = TreeModel(node_index=node, parent_indices=parents, k_out=k_out,
                     k_parents=k_parents, root=root, hp=hp)
    return tree._finalize()


# --- reference scoring (kept independent of the scan kernels for testing) ---

def no_split_score(parent_counts, parent_feat_hists, hp: Hyperparams) -> float:
    s = dm_log_marginal(parent_counts, hp.alpha_prior)
    s += hp.lambda_unsup * sum(dm_log_marginal(h, hp.alpha_prior) for h in parent_feat_hists)
    return s


def split_score(parent_counts, left_counts, right_counts,
                left_feat_hists, right_feat_hists, hp: Hyperparams,
                split_feature: int | None = None,
                threshold: int | None = None) -> float:
    """Hybrid criterion for one candidate split, from explicit count vectors.

    When ``split_feature``/``threshold`` identify which feature the split is
    on, that feature contributes a side-membership term plus per-side
    marginal likelihoods over its own support (neutral on unstructured
    data); every other feature contributes full-support child likelihoods.
    """
    a0 = hp.alpha_prior
    sup = dm_log_marginal(left_counts, a0) + dm_log_marginal(right_counts, a0)
    unsup = 0.0
    for pos, (lh, rh) in enumerate(zip(left_feat_hists, right_feat_hists)):
        if split_feature is not None and pos == split_feature:
            lh = np.asarray(lh, dtype=np.float64)
            rh = np.asarray(rh, dtype=np.float64)
            unsup += dm_log_marginal(lh[:threshold + 1], a0)
            unsup += dm_log_marginal(rh[threshold + 1:], a0)
            unsup += dm_log_marginal(np.array([lh.sum(), rh.sum()]), a0)
        else:
            unsup += dm_log_marginal(lh, a0) + dm_log_marginal(rh, a0)

    parent_counts = np.asarray(parent_counts, dtype=np.float64)
    left_counts = np.asarray(left_counts, dtype=np.float64)
    right_counts = np.asarray(right_counts, dtype=np.float64)
    k = len(parent_counts)
    n = parent_counts.sum()
    nl, nr = left_counts.sum(), right_counts.sum()
    pp = (parent_counts + a0) / (n + k * a0)
    pl = (left_counts + a0) / (nl + k * a0)
    pr = (right_counts + a0) / (nr + k * a0)

    def sym_kl(p, q):
        return float(((p - q) * (np.log(p) - np.log(q))).sum())

    div = (nl / n) * sym_kl(pl, pp) + (nr / n) * sym_kl(pr, pp)
    return sup + hp.lambda_unsup * unsup + hp.lambda_div * div
