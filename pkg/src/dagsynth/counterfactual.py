"""Discrete abduction-action-prediction over the fitted DAG of trees.

Abduction stores, per node, the conditional quantile u of the observed
value under its routed leaf's predictive distribution (bin mass plus the
position inside the bin). Prediction replays those quantiles through the
intervened graph by inverse CDF, so a null intervention reproduces the
observation's bins exactly and outputs can never leave the training range.
"""

from __future__ import annotations

import logging

import numpy as np

from .discretize import CATEGORICAL
from .errors import MissingValueError
from .model import Model

logger = logging.getLogger(__name__)

# within-bin positions are capped strictly below 1 with enough margin that
# adding frac * pred[b] to the left CDF can never round up to the next bin
_FRAC_CAP = 1.0 - 1e-6


def abduce(model: Model, observation) -> np.ndarray:
    """Per-node noise surrogates u in [0, 1) for one raw observation row."""
    if len(observation) != model.d:
        raise MissingValueError(f"observation must have {model.d} cells")
    bins = model.disc.to_bins_row(observation)
    u = np.empty(model.d)
    for i, tree in enumerate(model.trees):
        pred = tree.predictive_at(tree.route(bins))
        b = int(bins[i])
        spec = model.disc.features[i]
        if spec.kind == CATEGORICAL:
            frac = 0.5
        else:
            lo, hi = spec.bin_interval(b)
            x = float(observation[i])
            frac = 0.0 if hi <= lo else min(max((x - lo) / (hi - lo), 0.0), _FRAC_CAP)
        cum = np.cumsum(pred)
        left = cum[b - 1] if b > 0 else 0.0
        u[i] = left + frac * pred[b]
    return u


def _quantile_bin(pred: np.ndarray, u: float) -> tuple[int, float]:
    """Bin at quantile u of a predictive pmf, plus the within-bin fraction."""
    cum = np.cumsum(pred)
    b = min(int(np.searchsorted(cum, u, side="right")), len(pred) - 1)
    left = cum[b - 1] if b > 0 else 0.0
    width = pred[b]
    frac = 0.0 if width <= 0 else min(max((u - left) / width, 0.0), _FRAC_CAP)
    return b, frac


def predict_counterfactual(model: Model, u: np.ndarray, intervention: dict,
                           bin_only: bool = False) -> list:
    """Counterfactual row for noise surrogates ``u`` under do-assignments.

    Intervened nodes are severed from their parents and clamped to the
    training range; the rest follow their leaf predictive at quantile u.
    With ``bin_only`` the raw output is the bin center instead of the
    within-bin position.
    """
    disc = model.disc
    do_idx = {disc.index_of(name): value for name, value in intervention.items()}
    bins: list = [None] * model.d
    raw: list = [None] * model.d
    for i in model.dag.topo_order:
        spec = disc.features[i]
        if i in do_idx:
            v = do_idx[i]
            if spec.kind == CATEGORICAL:
                bins[i] = int(spec.values_to_bins(np.array([v], dtype=object))[0])
                raw[i] = spec.categories[bins[i]]
            else:
                v = float(v)
                lo, hi = float(spec.bin_edges[0]), float(spec.bin_edges[-1])
                if v < lo or v > hi:
                    logger.warning("intervention %s=%s outside training range [%s, %s]; clamped",
                                   spec.name, v, lo, hi)
                    v = min(max(v, lo), hi)
                bins[i] = int(spec.values_to_bins(np.array([v]))[0])
                raw[i] = v
            continue
        tree = model.trees[i]
        pred = tree.predictive_at(tree.route(bins))
        b, frac = _quantile_bin(pred, float(u[i]))
        bins[i] = b
        if spec.kind == CATEGORICAL:
            raw[i] = spec.categories[b]
        elif bin_only:
            raw[i] = spec.bin_center(b)
        else:
            lo, hi = spec.bin_interval(b)
            raw[i] = lo if hi <= lo else lo + frac * (hi - lo)
    return raw


def counterfactual(model: Model, observation, intervention: dict,
                   bin_only: bool = False) -> list:
    return predict_counterfactual(model, abduce(model, observation), intervention,
                                  bin_only=bin_only)


def resample_counterfactual(model: Model, observation, intervention: dict,
                            rng: np.random.Generator) -> list:
    """Quantile-free baseline: same intervention handling, but downstream
    nodes redraw fresh noise instead of keeping the observation's quantiles."""
    u = rng.random(model.d)
    return predict_counterfactual(model, u, intervention)
