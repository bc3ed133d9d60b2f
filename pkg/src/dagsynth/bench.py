"""Benchmark harness: oracle -> fit -> generate (backfill and rejection)
-> metrics, over a grid of graph sizes, constraint strictness levels, and
constraint types.

Strictness presets target joint acceptance rates of roughly 50% (easy,
interquartile range), 20% (medium tail), and 10% (hard tail); range and
mixed presets are calibrated on the training sample, while inter-column
presets pick the feature pair whose empirical ordering probability is
closest to the target.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .constraints import (
    Constraint,
    Equality,
    InterColumn,
    Range,
    compile_constraint_set,
    feasibility_check,
    satisfaction_mask,
)
from .generate import GenerationConfig, generate
from .metrics import per_feature_w1, score_report
from .model import Model, fit_model
from .oracle import SemSpec, ground_truth_constrained, random_sem, sample_sem
from .tree import Hyperparams

STRICTNESS_TARGETS = {"easy": 0.5, "medium": 0.2, "hard": 0.1}
CONSTRAINT_TYPES = ("range", "equality", "intercol", "mixed")


def preset_constraints(train: np.ndarray, names: list[str], strictness: str,
                       ctype: str) -> list[Constraint]:
    """Deterministic constraint presets calibrated on the training sample."""
    target = STRICTNESS_TARGETS[strictness]
    cols = train.shape[1]
    feat = cols - 1  # deepest node of the builder's topological order
    col = train[:, feat]
    if ctype == "range":
        if strictness == "easy":
            q25, q75 = np.quantile(col, [0.25, 0.75])
            return [Range(feature=names[feat], low=float(q25), high=float(q75))]
        low = float(np.quantile(col, 1.0 - target))
        return [Range(feature=names[feat], low=low)]
    if ctype == "equality":
        q = {"easy": 0.5, "medium": 0.8, "hard": 0.9}[strictness]
        return [Equality(feature=names[feat], value=float(np.quantile(col, q)))]
    if ctype == "intercol":
        best, best_gap = None, np.inf
        for i in range(cols):
            for j in range(cols):
                if i == j:
                    continue
                p = float(np.mean(train[:, i] > train[:, j]))
                if abs(p - target) < best_gap:
                    best, best_gap = (i, j), abs(p - target)
        return [InterColumn(left=names[best[0]], op=">", right=names[best[1]])]
    if ctype == "mixed":
        # least restrictive ordering pair plus a range tail tuned to the joint target
        best, best_p = None, -1.0
        for i in range(cols - 1):
            for j in range(cols - 1):
                if i == j:
                    continue
                p = float(np.mean(train[:, i] > train[:, j]))
                if p > best_p:
                    best, best_p = (i, j), p
        pair_ok = train[:, best[0]] > train[:, best[1]]
        lows = np.quantile(col, np.linspace(0.0, 0.98, 50))
        joints = [float(np.mean(pair_ok & (col >= lo))) for lo in lows]
        pick = int(np.argmin([abs(j - target) for j in joints]))
        return [Range(feature=names[feat], low=float(lows[pick])),
                InterColumn(left=names[best[0]], op=">", right=names[best[1]])]
    raise ValueError(f"unknown constraint type {ctype!r}")


@dataclass
class BenchCell:
    nodes: int
    seed: int
    strictness: str
    ctype: str
    feasible: bool
    csr_backfill: float = float("nan")
    csr_rejection: float = float("nan")
    mf: float = float("nan")
    cf: float = float("nan")
    final: float = float("nan")
    max_w1_binwidths: float = float("nan")
    time_fit: float = float("nan")
    time_backfill: float = float("nan")
    time_rejection: float = float("nan")
    attempts_per_accepted: float = float("nan")
    retry_rows: int = 0

    def to_obj(self) -> dict:
        return dict(self.__dict__)


def _mean_bin_widths(model: Model) -> np.ndarray:
    widths = []
    for f in model.disc.features:
        span = float(f.bin_edges[-1] - f.bin_edges[0])
        widths.append(span / f.k_eff if span > 0 else 1.0)
    return np.asarray(widths)


def run_benchmark_grid(nodes=(5, 10), strictness=("easy", "medium", "hard"),
                       ctypes=CONSTRAINT_TYPES, seeds=(0, 1, 2),
                       n_train: int = 3000, n_gen: int = 1000, k: int = 50,
                       oracle_budget: int = 500_000, run_rejection: bool = True,
                       hp: Hyperparams | None = None,
                       mode: str = "backfill") -> list[BenchCell]:
    cells: list[BenchCell] = []
    for d in nodes:
        for seed in seeds:
            spec = random_sem(d, seed=seed)
            names = spec.dag.node_names
            rng = np.random.default_rng([seed, d])
            train = sample_sem(spec, n_train, rng)
            t0 = time.perf_counter()
            model = fit_model(pd.DataFrame(train, columns=names), k=k,
                              dag=spec.dag, hp=hp, seed=seed)
            time_fit = time.perf_counter() - t0
            widths = _mean_bin_widths(model)
            for strict in strictness:
                for ctype in ctypes:
                    cell = BenchCell(nodes=d, seed=seed, strictness=strict,
                                     ctype=ctype, feasible=True)
                    cell.time_fit = time_fit
                    constraints = preset_constraints(train, names, strict, ctype)
                    cc_gen = compile_constraint_set(constraints, model.disc,
                                                    exact_equality=True)
                    cc_eval = compile_constraint_set(constraints, model.disc)
                    if not feasibility_check(cc_gen, model.disc, model.dag).feasible:
                        cell.feasible = False
                        cells.append(cell)
                        continue
                    cfg = GenerationConfig(n_rows=n_gen, mode=mode,
                                           rng_seed=seed * 1009 + d)
                    synth, rep = generate(model, cc_gen, cfg)
                    cell.csr_backfill = rep.csr
                    cell.time_backfill = rep.wall_time_s
                    cell.retry_rows = rep.row_retries

                    def predicate(m):
                        return satisfaction_mask([m[:, j] for j in range(m.shape[1])],
                                                 cc_eval, model.disc)

                    truth = ground_truth_constrained(spec, predicate, n_gen,
                                                     np.random.default_rng([seed, 5]),
                                                     oracle_budget)
                    synth_cols = [synth[c].to_numpy() for c in synth.columns]
                    truth_cols = [truth[:, j] for j in range(truth.shape[1])]
                    sr = score_report(synth_cols, truth_cols, cc_eval, model.disc)
                    cell.mf, cell.cf, cell.final = sr.mf, sr.cf, sr.final
                    cell.max_w1_binwidths = float(
                        np.max(np.asarray(sr.per_feature_w1) / widths))
                    if run_rejection:
                        cfg_r = GenerationConfig(n_rows=n_gen, mode="rejection_baseline",
                                                 rng_seed=seed * 1009 + d)
                        rej, rep_r = generate(model, cc_gen, cfg_r)
                        cell.csr_rejection = rep_r.csr
                        cell.time_rejection = rep_r.wall_time_s
                        cell.attempts_per_accepted = rep_r.attempts_per_accepted
                    cells.append(cell)
    return cells


def cells_to_frame(cells: list[BenchCell]) -> pd.DataFrame:
    return pd.DataFrame([c.to_obj() for c in cells])
