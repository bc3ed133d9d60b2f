"""Fidelity and constraint metrics for benchmark reports.

Marginal fidelity maps per-feature 1-Wasserstein distances into [0, 1]
relative to the reference range; correlation fidelity does the same with
the Frobenius norm of the Pearson-correlation gap divided by the feature
count. Both normalizations are conventions of this package (reports retain
the raw distances so alternatives can be recomputed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import wasserstein_distance

from .constraints import CompiledConstraints, satisfaction_mask
from .discretize import CONTINUOUS, Discretizer
from .errors import NoMinorityClassError, SchemaMismatchError


@dataclass
class ScoreReport:
    csr: float
    mf: float
    cf: float
    final: float
    per_feature_w1: list[float]
    ks: list[float]
    mcs: float | None = None

    def to_obj(self) -> dict:
        return {"csr": self.csr, "mf": self.mf, "cf": self.cf, "final": self.final,
                "per_feature_w1": self.per_feature_w1, "ks": self.ks, "mcs": self.mcs}


def csr(raw_columns: list[np.ndarray], cs: CompiledConstraints, disc: Discretizer) -> float:
    """Fraction of rows satisfying every constraint at raw level."""
    if not cs.constraints:
        return 1.0
    return float(satisfaction_mask(raw_columns, cs, disc).mean())


def _is_numeric(col: np.ndarray) -> bool:
    return np.issubdtype(np.asarray(col).dtype, np.number)


def _column_w1(synth: np.ndarray, truth: np.ndarray) -> tuple[float, float]:
    """(W1, reference range). Categorical columns use total variation on
    category frequencies with a unit range."""
    if _is_numeric(truth):
        s = np.asarray(synth, dtype=np.float64)
        t = np.asarray(truth, dtype=np.float64)
        return float(wasserstein_distance(s, t)), float(t.max() - t.min())
    cats = sorted({str(v) for v in truth} | {str(v) for v in synth})
    ps = np.array([np.mean([str(v) == c for v in synth]) for c in cats])
    pt = np.array([np.mean([str(v) == c for v in truth]) for c in cats])
    return float(0.5 * np.abs(ps - pt).sum()), 1.0


def per_feature_w1(synth_columns, truth_columns) -> list[float]:
    return [_column_w1(s, t)[0] for s, t in zip(synth_columns, truth_columns)]


def marginal_fidelity(synth_columns, truth_columns) -> float:
    """Mean over features of max(0, 1 - W1 / truth range)."""
    if len(synth_columns) != len(truth_columns):
        raise SchemaMismatchError("synthetic and reference tables differ in width")
    terms = []
    for s, t in zip(synth_columns, truth_columns):
        w1, rng = _column_w1(s, t)
        if rng <= 0:
            terms.append(1.0 if w1 == 0 else 0.0)
        else:
            terms.append(max(0.0, 1.0 - w1 / rng))
    return float(np.mean(terms))


def _correlation_matrix(columns) -> np.ndarray:
    """Pearson correlations of the numeric encoding; constant columns get 0."""
    cols = []
    for c in columns:
        if _is_numeric(c):
            cols.append(np.asarray(c, dtype=np.float64))
        else:
            cats = sorted({str(v) for v in c})
            lookup = {v: i for i, v in enumerate(cats)}
            cols.append(np.array([lookup[str(v)] for v in c], dtype=np.float64))
    mat = np.column_stack(cols)
    sd = mat.std(axis=0)
    good = sd > 0
    corr = np.zeros((mat.shape[1], mat.shape[1]))
    if good.any():
        with np.errstate(invalid="ignore", divide="ignore"):
            sub = np.atleast_2d(np.corrcoef(mat[:, good], rowvar=False))
        corr[np.ix_(good, good)] = np.nan_to_num(sub)
    np.fill_diagonal(corr, 1.0)
    return corr


def correlation_fidelity(synth_columns, truth_columns) -> float:
    """max(0, 1 - ||C_synth - C_truth||_F / d)."""
    if len(synth_columns) != len(truth_columns):
        raise SchemaMismatchError("synthetic and reference tables differ in width")
    d = len(truth_columns)
    gap = np.linalg.norm(_correlation_matrix(synth_columns) - _correlation_matrix(truth_columns))
    return float(max(0.0, 1.0 - gap / d))


def ks_statistic(synth_col, truth_col) -> float:
    """Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs."""
    a = np.sort(np.asarray(synth_col, dtype=np.float64))
    b = np.sort(np.asarray(truth_col, dtype=np.float64))
    allv = np.concatenate([a, b])
    ca = np.searchsorted(a, allv, side="right") / len(a)
    cb = np.searchsorted(b, allv, side="right") / len(b)
    return float(np.abs(ca - cb).max())


def mode_collapse_score(synth_labels, real_labels) -> float:
    """1 - min(|p_syn - p_real| / p_real, 1) on the real minority class."""
    real = [str(v) for v in real_labels]
    values, counts = np.unique(real, return_counts=True)
    if len(values) < 2:
        raise NoMinorityClassError("reference labels have a single class")
    minority = values[int(np.argmin(counts))]
    p_real = counts.min() / counts.sum()
    p_syn = np.mean([str(v) == minority for v in synth_labels])
    return float(1.0 - min(abs(p_syn - p_real) / p_real, 1.0))


def score_report(synth_columns, truth_columns, cs: CompiledConstraints,
                 disc: Discretizer, label_feature: str | None = None) -> ScoreReport:
    c = csr(synth_columns, cs, disc)
    mf = marginal_fidelity(synth_columns, truth_columns)
    cf = correlation_fidelity(synth_columns, truth_columns)
    w1s = per_feature_w1(synth_columns, truth_columns)
    ks = [ks_statistic(s, t) if _is_numeric(t) else float("nan")
          for s, t in zip(synth_columns, truth_columns)]
    mcs = None
    if label_feature is not None:
        li = disc.index_of(label_feature)
        mcs = mode_collapse_score(synth_columns[li], truth_columns[li])
    return ScoreReport(csr=c, mf=mf, cf=cf, final=c * (0.5 * mf + 0.5 * cf),
                       per_feature_w1=w1s, ks=ks, mcs=mcs)
