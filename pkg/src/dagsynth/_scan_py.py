"""Pure-NumPy split-scan kernel (fallback for the compiled extension).

Scores every (parent feature, threshold bin) candidate of a tree node with
the hybrid criterion

    score = logML(target | split) + lam_unsup * logML(features | split)
            + lam_div * weighted symmetric KL(children vs parent)

where logML is the Dirichlet-multinomial log marginal likelihood with a
symmetric prior. The feature term treats the split feature as a two-sided
mixture (side membership plus one Dirichlet per side over that side's own
cells), which is exactly neutral on unstructured data, and models every
other parent feature with a full-support Dirichlet per child, which is what
rewards splits that concentrate correlated features. A split is taken only
when the best candidate beats the node's no-split marginal likelihood.

The compiled kernel in ``_splitscan.pyx`` implements the same arithmetic;
both must agree to floating-point noise and both pick the first-best
candidate scanning features then thresholds in ascending order.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

BACKEND_NAME = "python"


def dm_log_marginal(counts: np.ndarray, alpha0: float) -> float:
    """Dirichlet-multinomial log marginal likelihood of one count vector."""
    c = np.asarray(counts, dtype=np.float64)
    k = c.shape[-1]
    n = c.sum()
    return float(gammaln(alpha0 + c).sum() - k * gammaln(alpha0)
                 + gammaln(k * alpha0) - gammaln(k * alpha0 + n))


def _log_ml_rows(counts: np.ndarray, alpha0: float) -> np.ndarray:
    """Row-wise logML for a (T, K) matrix of count vectors."""
    k = counts.shape[1]
    n = counts.sum(axis=1)
    return (gammaln(alpha0 + counts).sum(axis=1) - k * gammaln(alpha0)
            + gammaln(k * alpha0) - gammaln(k * alpha0 + n))


def _split_feature_term(hist: np.ndarray, a0: float) -> np.ndarray:
    """Unsupervised term of the split feature itself, for all thresholds.

    Models the split as side ~ DM(2 cells) and each side's cells with their
    own Dirichlet over the side's support only; identically distributed data
    gains nothing beyond the prior cost.
    """
    kj = len(hist)
    n = hist.sum()
    g = gammaln(a0 + hist)
    cg = np.cumsum(g)[:-1]
    nl = np.cumsum(hist)[:-1]
    nr = n - nl
    sizes_l = np.arange(1, kj, dtype=np.float64)
    sizes_r = kj - sizes_l
    left = cg - sizes_l * gammaln(a0) + gammaln(sizes_l * a0) - gammaln(sizes_l * a0 + nl)
    right = (g.sum() - cg) - sizes_r * gammaln(a0) + gammaln(sizes_r * a0) \
        - gammaln(sizes_r * a0 + nr)
    side = (gammaln(a0 + nl) + gammaln(a0 + nr) - 2 * gammaln(a0)
            + gammaln(2 * a0) - gammaln(2 * a0 + n))
    return left + right + side


def scan_splits(y, X, k_y, k_feats, alpha_prior, lam_unsup, lam_div, min_leaf):
    """Best split of a node's rows; returns (feat_pos, threshold, score, baseline).

    ``feat_pos`` is -1 when no candidate satisfies the minimum-leaf-size
    requirement. The baseline is the no-split score of the same node (its
    diversity term is identically zero).
    """
    y = np.asarray(y, dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)
    n, p = X.shape
    a0 = float(alpha_prior)

    class_counts = np.bincount(y, minlength=k_y).astype(np.float64)
    feat_hists = [np.bincount(X[:, j], minlength=int(k_feats[j])).astype(np.float64)
                  for j in range(p)]
    baseline = dm_log_marginal(class_counts, a0)
    baseline += lam_unsup * sum(dm_log_marginal(h, a0) for h in feat_hists)

    parent_p = (class_counts + a0) / (n + k_y * a0)
    log_parent = np.log(parent_p)

    best_j, best_t, best_score = -1, -1, -np.inf
    for j in range(p):
        kj = int(k_feats[j])
        if kj < 2:
            continue
        xj = X[:, j]
        joint = np.zeros((kj, k_y))
        np.add.at(joint, (xj, y), 1.0)
        left_class = np.cumsum(joint, axis=0)[:-1]       # (kj-1, k_y)
        nl = left_class.sum(axis=1)
        nr = n - nl
        valid = (nl >= min_leaf) & (nr >= min_leaf)
        if not valid.any():
            continue
        right_class = class_counts[None, :] - left_class
        sup = _log_ml_rows(left_class, a0) + _log_ml_rows(right_class, a0)

        unsup = _split_feature_term(feat_hists[j], a0)
        for j2 in range(p):
            if j2 == j:
                continue
            cross = np.zeros((kj, int(k_feats[j2])))
            np.add.at(cross, (xj, X[:, j2]), 1.0)
            left_hist = np.cumsum(cross, axis=0)[:-1]
            right_hist = feat_hists[j2][None, :] - left_hist
            unsup = unsup + _log_ml_rows(left_hist, a0) + _log_ml_rows(right_hist, a0)

        pl = (left_class + a0) / (nl + k_y * a0)[:, None]
        pr = (right_class + a0) / (nr + k_y * a0)[:, None]
        kl_l = ((pl - parent_p) * (np.log(pl) - log_parent)).sum(axis=1)
        kl_r = ((pr - parent_p) * (np.log(pr) - log_parent)).sum(axis=1)
        div = (nl / n) * kl_l + (nr / n) * kl_r

        scores = sup + lam_unsup * unsup + lam_div * div
        scores[~valid] = -np.inf
        t = int(np.argmax(scores))
        if scores[t] > best_score:
            best_j, best_t, best_score = j, t, float(scores[t])

    return best_j, best_t, best_score, baseline
