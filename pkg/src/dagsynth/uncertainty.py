"""Closed-form entropy decomposition of Dirichlet posteriors.

For a leaf posterior alpha with S = sum(alpha), the expected entropy of a
category distribution drawn from Dir(alpha) is

    H_alea = sum_k (alpha_k / S) * (psi(S + 1) - psi(alpha_k + 1))

(the irreducible part), while the entropy of the predictive mean H(alpha/S)
is the total. Their difference is the epistemic part: it is nonnegative by
concavity of entropy and vanishes as the leaf's sample count grows. All
entropies are in nats.
"""

from __future__ import annotations

import numpy as np
from scipy.special import digamma

from .errors import MissingValueError, NonPositiveAlphaError
from .model import Model


def _check_alpha(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=np.float64)
    if a.ndim != 1 or a.size == 0 or np.any(a <= 0):
        raise NonPositiveAlphaError("alpha entries must be positive")
    return a


def aleatoric_entropy(alpha) -> float:
    a = _check_alpha(alpha)
    s = a.sum()
    return float(np.sum((a / s) * (digamma(s + 1.0) - digamma(a + 1.0))))


def total_entropy(alpha) -> float:
    a = _check_alpha(alpha)
    p = a / a.sum()
    return float(-np.sum(p * np.log(p)))


def epistemic_entropy(alpha) -> float:
    return total_entropy(alpha) - aleatoric_entropy(alpha)


def decompose(alpha) -> tuple[float, float, float]:
    """(total, aleatoric, epistemic); total = aleatoric + epistemic exactly."""
    alea = aleatoric_entropy(alpha)
    epi = total_entropy(alpha) - alea
    return alea + epi, alea, epi


def cell_uncertainty(model: Model, row_bins) -> np.ndarray:
    """Per-feature (total, aleatoric, epistemic) at the routed leaves; (d, 3)."""
    if any(b is None for b in row_bins):
        raise MissingValueError("row has unassigned cells")
    out = np.empty((model.d, 3))
    for i, tree in enumerate(model.trees):
        out[i] = decompose(tree.alpha_at(tree.route(row_bins)))
    return out


def mean_leaf_epistemic(model: Model, weighted: bool = True) -> float:
    """Average epistemic entropy over all leaves of all trees.

    Weighted by leaf occupancy by default, i.e. the epistemic uncertainty a
    random training row is exposed to.
    """
    vals = []
    weights = []
    for tree in model.trees:
        for lid in range(len(tree.leaves)):
            vals.append(epistemic_entropy(tree.alpha_at(lid)))
            weights.append(tree.leaf_weights[lid])
    vals = np.asarray(vals)
    if not weighted:
        return float(vals.mean())
    w = np.asarray(weights)
    return float((vals * w).sum() / w.sum())


def uncertainty_report(model: Model, data, per_cell: bool = False) -> dict:
    """Aggregate decomposition over a table of raw rows."""
    from .discretize import coerce_table

    columns, _ = coerce_table(data)
    bins = model.disc.to_bins(columns)
    cells = np.stack([cell_uncertainty(model, row) for row in bins])  # (n, d, 3)
    means = cells.mean(axis=(0, 1))
    per_feature = cells.mean(axis=0)
    report = {
        "n_rows": int(bins.shape[0]),
        "total": float(means[0]),
        "aleatoric": float(means[1]),
        "epistemic": float(means[2]),
        "per_feature": {
            name: {"total": float(t), "aleatoric": float(a), "epistemic": float(e)}
            for name, (t, a, e) in zip(model.disc.names, per_feature)
        },
    }
    if per_cell:
        report["per_cell"] = cells.tolist()
    return report
