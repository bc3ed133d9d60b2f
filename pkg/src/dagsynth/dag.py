"""Directed acyclic graph over features: validation, ordering, and a cheap
mutual-information structure heuristic.

The heuristic is not a causal discovery algorithm. It orders nodes by total
pairwise mutual information (estimated on bins), lets each node pick its
strongest earlier neighbours as parents, and keeps only scores above a
permutation-null threshold. Ties break toward lower column indices so the
result is deterministic for a given dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .discretize import BinnedDataset
from .errors import CycleDetectedError, UnknownNodeError

NULL_SHUFFLES = 20
NULL_QUANTILE = 0.99
DEFAULT_MAX_PARENTS = 3


@dataclass
class CausalDag:
    node_names: list[str]
    parents: list[list[int]]          # per node, sorted parent indices
    topo_order: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.topo_order:
            self.topo_order = _toposort(len(self.node_names), self.parents)

    @property
    def d(self) -> int:
        return len(self.node_names)

    def children(self, i: int) -> list[int]:
        return [c for c in range(self.d) if i in self.parents[c]]

    def edges(self) -> list[tuple[int, int]]:
        return [(p, c) for c in range(self.d) for p in self.parents[c]]

    def index_of(self, name: str) -> int:
        try:
            return self.node_names.index(name)
        except ValueError:
            raise UnknownNodeError(f"no such node: {name!r}") from None

    def to_json_obj(self) -> dict:
        return {
            "nodes": list(self.node_names),
            "edges": [[self.node_names[p], self.node_names[c]] for p, c in self.edges()],
        }


def _toposort(d: int, parents: list[list[int]]) -> list[int]:
    """Kahn's algorithm, smallest index first; raises on cycles."""
    indeg = [len(ps) for ps in parents]
    children: list[list[int]] = [[] for _ in range(d)]
    for c, ps in enumerate(parents):
        for p in ps:
            children[p].append(c)
    ready = sorted(i for i in range(d) if indeg[i] == 0)
    order: list[int] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        changed = False
        for c in children[node]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
                changed = True
        if changed:
            ready.sort()
    if len(order) < d:
        raise CycleDetectedError(_find_cycle(d, parents))
    return order


def _find_cycle(d: int, parents: list[list[int]]) -> list[int]:
    color = [0] * d  # 0 unvisited, 1 on stack, 2 done
    stack: list[int] = []

    def dfs(u: int):
        color[u] = 1
        stack.append(u)
        for v in parents[u]:
            if color[v] == 1:
                return stack[stack.index(v):] + [v]
            if color[v] == 0:
                found = dfs(v)
                if found:
                    return found
        color[u] = 2
        stack.pop()
        return None

    for s in range(d):
        if color[s] == 0:
            cyc = dfs(s)
            if cyc:
                return cyc
    return []


def validate_dag(node_names: list[str], edges: list[tuple[str, str]]) -> CausalDag:
    """Build a CausalDag from (parent, child) name pairs, checking acyclicity."""
    if len(set(node_names)) != len(node_names):
        raise UnknownNodeError("node names must be unique")
    idx = {n: i for i, n in enumerate(node_names)}
    parents: list[set[int]] = [set() for _ in node_names]
    for p, c in edges:
        if p not in idx or c not in idx:
            raise UnknownNodeError(f"edge ({p!r}, {c!r}) references an unknown node")
        if p == c:
            raise CycleDetectedError([p, p])
        parents[idx[c]].add(idx[p])
    plists = [sorted(s) for s in parents]
    return CausalDag(node_names=list(node_names), parents=plists)


def reverse_topo(dag: CausalDag) -> list[int]:
    return list(reversed(dag.topo_order))


def dag_to_json(dag: CausalDag, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(dag.to_json_obj(), fh, indent=2)


def dag_from_json_obj(obj: dict) -> CausalDag:
    return validate_dag([str(n) for n in obj["nodes"]],
                        [(str(p), str(c)) for p, c in obj["edges"]])


def dag_from_json(path: str) -> CausalDag:
    with open(path) as fh:
        return dag_from_json_obj(json.load(fh))


def _mutual_information(x: np.ndarray, y: np.ndarray, kx: int, ky: int) -> float:
    """Plug-in MI (nats) of two binned columns."""
    joint = np.bincount(x * ky + y, minlength=kx * ky).reshape(kx, ky).astype(np.float64)
    n = joint.sum()
    if n == 0:
        return 0.0
    pj = joint / n
    px = pj.sum(axis=1, keepdims=True)
    py = pj.sum(axis=0, keepdims=True)
    mask = pj > 0
    return float(np.sum(pj[mask] * np.log(pj[mask] / (px @ py)[mask])))


def learn_structure_heuristic(data: BinnedDataset,
                              max_parents: int = DEFAULT_MAX_PARENTS) -> CausalDag:
    """Mutual-information parent selection over an MI-derived node ordering.

    Edges require pairwise MI above the 99th percentile of a 20-shuffle
    permutation null, which leaves independent columns (near-)edgeless.
    """
    d = data.disc.d
    names = data.disc.names
    if max_parents <= 0 or d < 2:
        return CausalDag(node_names=names, parents=[[] for _ in range(d)])
    bins = data.bins
    ks = [f.k_eff for f in data.disc.features]
    rng = np.random.default_rng(0)  # internal nulls; keeps the result a pure function of data

    mi = np.zeros((d, d))
    thresh = np.zeros((d, d))
    for a in range(d):
        for b in range(a + 1, d):
            mi[a, b] = mi[b, a] = _mutual_information(bins[:, a], bins[:, b], ks[a], ks[b])
            nulls = np.empty(NULL_SHUFFLES)
            for s in range(NULL_SHUFFLES):
                nulls[s] = _mutual_information(
                    rng.permutation(bins[:, a]), bins[:, b], ks[a], ks[b])
            thresh[a, b] = thresh[b, a] = np.quantile(nulls, NULL_QUANTILE)

    # order nodes by descending total MI; ties toward lower index
    totals = mi.sum(axis=1)
    order = sorted(range(d), key=lambda i: (-totals[i], i))
    position = {node: pos for pos, node in enumerate(order)}

    parents: list[list[int]] = [[] for _ in range(d)]
    for node in range(d):
        cands = [j for j in range(d) if position[j] < position[node] and mi[node, j] > thresh[node, j]]
        cands.sort(key=lambda j: (-mi[node, j], j))
        parents[node] = sorted(cands[:max_parents])
    return CausalDag(node_names=names, parents=parents)
