"""Fitted model: discretizer + DAG + one tree per node."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dag import CausalDag, learn_structure_heuristic
from .discretize import BinnedDataset, Discretizer, bin_dataset, fit_discretizer
from .tree import Hyperparams, TreeModel, fit_tree


@dataclass
class Model:
    disc: Discretizer
    dag: CausalDag
    trees: list[TreeModel]          # index-aligned with DAG nodes
    hp: Hyperparams
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.disc.d


def fit_model(data, *, k: int = 50, kinds=None, names=None, dag: CausalDag | None = None,
              max_parents: int = 3, hp: Hyperparams | None = None,
              seed: int = 0) -> Model:
    """Discretize, resolve the DAG (given or learned), fit all trees.

    Fitting is deterministic for fixed inputs; ``seed`` is recorded in the
    metadata and seeds generation defaults downstream.
    """
    hp = hp or Hyperparams()
    disc = fit_discretizer(data, k, kinds=kinds, names=names)
    binned = bin_dataset(disc, data)
    if dag is None:
        dag = learn_structure_heuristic(binned, max_parents=max_parents)
    else:
        if list(dag.node_names) != disc.names:
            dag = _align_dag(dag, disc.names)
    trees = [fit_tree(binned, dag, i, hp) for i in range(disc.d)]
    meta = {"n_rows": int(binned.n), "seed": int(seed), "k": int(k)}
    return Model(disc=disc, dag=dag, trees=trees, hp=hp, meta=meta)


def _align_dag(dag: CausalDag, names: list[str]) -> CausalDag:
    """Reindex a DAG whose nodes match the data columns by name only."""
    from .errors import UnknownNodeError

    if sorted(dag.node_names) != sorted(names):
        raise UnknownNodeError(
            f"DAG nodes {dag.node_names} do not match data columns {names}")
    old = {n: i for i, n in enumerate(dag.node_names)}
    remap = [old[n] for n in names]          # new index -> old index
    inv = {o: i for i, o in enumerate(remap)}
    parents = [sorted(inv[p] for p in dag.parents[remap[i]]) for i in range(len(names))]
    return CausalDag(node_names=list(names), parents=parents)
