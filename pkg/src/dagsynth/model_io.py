"""Model file format (versioned JSON) and the CSV fit pipeline.

The file is canonical JSON (sorted keys, compact separators, full-precision
floats), so save -> load -> save is byte-identical and refitting the same
inputs with the same seed reproduces the same file. Metadata deliberately
carries no wall-clock timestamp for that reason.
"""

from __future__ import annotations

import json

import numpy as np
import pandas as pd

from .dag import CausalDag, dag_from_json, dag_from_json_obj
from .discretize import CATEGORICAL, CONTINUOUS, Discretizer, FeatureSpec
from .errors import CorruptFileError, VersionMismatchError
from .model import Model, fit_model
from .tree import Hyperparams, LeafStats, TreeLeaf, TreeModel, TreeSplit

FORMAT_VERSION = 1


def _node_to_obj(node):
    if isinstance(node, TreeLeaf):
        st = node.stats
        return {"leaf": {
            "counts": st.counts.tolist(),
            "ph": [h.tolist() for h in st.parent_hists],
            "cp": {str(c): [h.tolist() for h in hists] for c, hists in st.class_parent.items()},
            "n": st.n_leaf,
            "w": st.leaf_weight,
        }}
    return {"f": node.feat_pos, "t": node.split_bin,
            "l": _node_to_obj(node.left), "r": _node_to_obj(node.right)}


def _node_from_obj(obj):
    if "leaf" in obj:
        lf = obj["leaf"]
        stats = LeafStats(
            counts=np.asarray(lf["counts"], dtype=np.int64),
            parent_hists=[np.asarray(h, dtype=np.int64) for h in lf["ph"]],
            class_parent={int(c): [np.asarray(h, dtype=np.int64) for h in hists]
                          for c, hists in lf["cp"].items()},
            n_leaf=int(lf["n"]),
            leaf_weight=float(lf["w"]),
        )
        return TreeLeaf(stats=stats)
    return TreeSplit(feat_pos=int(obj["f"]), split_bin=int(obj["t"]),
                     left=_node_from_obj(obj["l"]), right=_node_from_obj(obj["r"]))


def _feature_to_obj(f: FeatureSpec) -> dict:
    if f.kind == CATEGORICAL:
        return {"name": f.name, "kind": f.kind, "categories": f.categories,
                "k_requested": f.k_requested}
    return {"name": f.name, "kind": f.kind, "bin_edges": f.bin_edges.tolist(),
            "k_requested": f.k_requested}


def _feature_from_obj(obj: dict) -> FeatureSpec:
    if obj["kind"] == CATEGORICAL:
        return FeatureSpec(name=obj["name"], kind=CATEGORICAL,
                           categories=list(obj["categories"]),
                           k_requested=int(obj["k_requested"]))
    return FeatureSpec(name=obj["name"], kind=CONTINUOUS,
                       bin_edges=np.asarray(obj["bin_edges"], dtype=np.float64),
                       k_requested=int(obj["k_requested"]))


def model_to_obj(model: Model) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "discretizer": [_feature_to_obj(f) for f in model.disc.features],
        "dag": model.dag.to_json_obj(),
        "hyperparams": model.hp.to_obj(),
        "meta": model.meta,
        "trees": [{
            "node": t.node_index,
            "parents": t.parent_indices,
            "k_out": t.k_out,
            "k_parents": t.k_parents,
            "root": _node_to_obj(t.root),
        } for t in model.trees],
    }


def model_from_obj(obj: dict) -> Model:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"model file format {version!r} is not supported (expected {FORMAT_VERSION})")
    try:
        disc = Discretizer(features=[_feature_from_obj(f) for f in obj["discretizer"]])
        dag = dag_from_json_obj(obj["dag"])
        hp = Hyperparams.from_obj(obj["hyperparams"])
        trees = []
        for t in obj["trees"]:
            tree = TreeModel(node_index=int(t["node"]),
                             parent_indices=[int(p) for p in t["parents"]],
                             k_out=int(t["k_out"]),
                             k_parents=[int(k) for k in t["k_parents"]],
                             root=_node_from_obj(t["root"]), hp=hp)
            trees.append(tree._finalize())
        return Model(disc=disc, dag=dag, trees=trees, hp=hp, meta=obj.get("meta", {}))
    except (KeyError, TypeError, IndexError) as e:
        raise CorruptFileError(f"model file is malformed: {e}") from e


def save_model(model: Model, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_obj(model), fh, sort_keys=True, separators=(",", ":"))


def load_model(path: str) -> Model:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CorruptFileError(f"cannot parse model file {path}: {e}") from e
    if not isinstance(obj, dict) or "format_version" not in obj:
        raise CorruptFileError(f"model file {path} lacks a format_version")
    return model_from_obj(obj)


def fit_pipeline(csv_path: str, config: dict | None = None) -> Model:
    """CSV -> discretize -> (load or learn) DAG -> fit trees.

    Config keys: k, seed, max_parents, dag_file, categorical (list of column
    names forced categorical), lambda_unsup, lambda_div, min_samples_leaf,
    max_depth, alpha_prior, backward_smoothing, point_estimate_leaves.
    """
    config = dict(config or {})
    df = pd.read_csv(csv_path)
    forced = set(config.get("categorical", ()))
    kinds = []
    for col in df.columns:
        if col in forced or not pd.api.types.is_numeric_dtype(df[col]):
            kinds.append(CATEGORICAL)
        else:
            kinds.append(CONTINUOUS)
    dag: CausalDag | None = None
    if config.get("dag_file"):
        dag = dag_from_json(config["dag_file"])
    hp = Hyperparams(
        lambda_unsup=float(config.get("lambda_unsup", 0.5)),
        lambda_div=float(config.get("lambda_div", 0.1)),
        min_samples_leaf=int(config.get("min_samples_leaf", 10)),
        max_depth=int(config.get("max_depth", 12)),
        alpha_prior=float(config.get("alpha_prior", 1.0)),
        backward_smoothing=float(config.get("backward_smoothing", 0.1)),
        point_estimate_leaves=bool(config.get("point_estimate_leaves", False)),
    )
    return fit_model(df, k=int(config.get("k", 50)), kinds=kinds, dag=dag,
                     max_parents=int(config.get("max_parents", 3)), hp=hp,
                     seed=int(config.get("seed", 0)))
