"""Ground-truth structural equation models for benchmarking.

Builds random SEMs over configurable DAGs, samples unconstrained training
data, provides rejection-based samples from the true constrained
conditional, and computes exact counterfactuals by noise inversion. Each
non-root node applies a named mechanism to the weighted sum of its parents
(the MLP mechanism consumes the parent vector directly) and composes it
with exogenous noise either additively, x = f + scale * eps, or
multiplicatively, x = f * (1 + sigma * eps).
"""

from __future__ import annotations

import json

import numpy as np
from scipy.stats import beta as beta_dist

from .dag import CausalDag, validate_dag
from .errors import BudgetExhaustedError, NearZeroMechanismError

DEADZONE_T = 0.5
MLP_HIDDEN = 16
MECHANISMS = ("linear", "tanh", "quadratic", "sine", "arcsine",
              "deadzone", "betaflux", "mlp_silu")
NOISE_FAMILIES = ("gaussian", "student_t", "laplace", "beta")


class SemSpec:
    """Fully specified SEM: DAG, per-node mechanism and noise, edge weights."""

    def __init__(self, dag: CausalDag, mechanisms: dict[int, str],
                 noise: dict[int, tuple], weights: dict[tuple[int, int], float],
                 noise_mode: str = "additive", sigma: float = 0.1,
                 noise_scale: dict[int, float] | None = None, seed: int = 0):
        self.dag = dag
        self.mechanisms = mechanisms
        self.noise = noise
        self.weights = weights
        self.noise_mode = noise_mode
        self.sigma = sigma
        self.noise_scale = noise_scale or {}
        self.seed = seed
        self._mlp_params: dict[int, tuple] = {}
        for node, mech in mechanisms.items():
            if mech == "mlp_silu":
                p = len(dag.parents[node])
                r = np.random.default_rng([seed, node, 7])
                w1 = r.standard_normal((p, MLP_HIDDEN)) / np.sqrt(max(p, 1))
                b1 = r.standard_normal(MLP_HIDDEN) * 0.1
                w2 = r.standard_normal(MLP_HIDDEN) / np.sqrt(MLP_HIDDEN)
                self._mlp_params[node] = (w1, b1, w2)

    # --- mechanisms ---

    def mechanism_value(self, node: int, parent_matrix: np.ndarray) -> np.ndarray:
        """f_node applied to an (n, n_parents) matrix of parent values."""
        mech = self.mechanisms[node]
        if mech == "mlp_silu":
            w1, b1, w2 = self._mlp_params[node]
            h = parent_matrix @ w1 + b1
            return (h / (1.0 + np.exp(-h))) @ w2
        w = np.array([self.weights[(p, node)] for p in self.dag.parents[node]])
        z = parent_matrix @ w
        if mech == "linear":
            return z
        if mech == "tanh":
            return np.tanh(z)
        if mech == "quadratic":
            return z ** 2
        if mech == "sine":
            return np.sin(z)
        if mech == "arcsine":
            return np.arcsin(np.clip(np.tanh(z), -1.0, 1.0))
        if mech == "deadzone":
            return np.where(z > DEADZONE_T, z - DEADZONE_T,
                            np.where(z < -DEADZONE_T, z + DEADZONE_T, 0.0))
        if mech == "betaflux":
            return 2.0 * beta_dist.cdf(1.0 / (1.0 + np.exp(-z)), 2.0, 5.0) - 1.0
        raise ValueError(f"unknown mechanism {mech!r}")

    def noise_draw(self, node: int, rng: np.random.Generator, n: int) -> np.ndarray:
        fam = self.noise.get(node, ("gaussian",))
        name = fam[0]
        if name == "gaussian":
            return rng.standard_normal(n)
        if name == "student_t":
            return rng.standard_t(fam[1], size=n)
        if name == "laplace":
            return rng.laplace(size=n)
        if name == "beta":
            return rng.beta(fam[1], fam[2], size=n)
        raise ValueError(f"unknown noise family {name!r}")

    def scale_of(self, node: int) -> float:
        return float(self.noise_scale.get(node, 1.0))

    # --- serialization ---

    def to_obj(self) -> dict:
        names = self.dag.node_names
        return {
            "nodes": list(names),
            "edges": [[names[p], names[c]] for p, c in self.dag.edges()],
            "mechanisms": {names[i]: m for i, m in self.mechanisms.items()},
            "noise": {names[i]: list(f) for i, f in self.noise.items()},
            "noise_scale": {names[i]: s for i, s in self.noise_scale.items()},
            "noise_mode": self.noise_mode,
            "sigma": self.sigma,
            "weights": {f"{names[p]}->{names[c]}": w for (p, c), w in self.weights.items()},
            "seed": self.seed,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SemSpec":
        dag = validate_dag([str(n) for n in obj["nodes"]],
                           [(p, c) for p, c in obj["edges"]])
        idx = {n: i for i, n in enumerate(dag.node_names)}
        weights = {}
        for key, w in obj.get("weights", {}).items():
            p, c = key.split("->")
            weights[(idx[p], idx[c])] = float(w)
        return cls(
            dag=dag,
            mechanisms={idx[n]: m for n, m in obj.get("mechanisms", {}).items()},
            noise={idx[n]: tuple(f) for n, f in obj.get("noise", {}).items()},
            weights=weights,
            noise_mode=obj.get("noise_mode", "additive"),
            sigma=float(obj.get("sigma", 0.1)),
            noise_scale={idx[n]: float(s) for n, s in obj.get("noise_scale", {}).items()},
            seed=int(obj.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, path: str) -> "SemSpec":
        with open(path) as fh:
            return cls.from_obj(json.load(fh))


def sample_sem(spec: SemSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Ancestral sampling of n rows from the true SEM; roots draw pure noise."""
    d = spec.dag.d
    out = np.empty((n, d))
    for i in spec.dag.topo_order:
        parents = spec.dag.parents[i]
        eps = spec.noise_draw(i, rng, n)
        if not parents:
            out[:, i] = spec.scale_of(i) * eps
            continue
        f = spec.mechanism_value(i, out[:, parents])
        if spec.noise_mode == "multiplicative":
            out[:, i] = f * (1.0 + spec.sigma * eps)
        else:
            out[:, i] = f + spec.scale_of(i) * eps
    return out


def ground_truth_constrained(spec: SemSpec, predicate, n: int,
                             rng: np.random.Generator, budget: int) -> np.ndarray:
    """First n rows of the true conditional, by rejection from the SEM.

    ``predicate`` maps an (m, d) matrix to a boolean mask. Raises when the
    draw budget runs out before n rows are accepted.
    """
    accepted = []
    drawn = 0
    got = 0
    # first chunk is exactly n so an all-accepting predicate reproduces
    # sample_sem draw-for-draw; later chunks scale with the observed rate
    chunk = n
    while got < n:
        if drawn >= budget:
            raise BudgetExhaustedError(
                f"accepted {got}/{n} rows after {drawn} draws (budget {budget})")
        m = min(chunk, budget - drawn)
        batch = sample_sem(spec, m, rng)
        drawn += m
        keep = batch[predicate(batch)]
        if len(keep):
            accepted.append(keep)
            got += len(keep)
        rate = max(got / drawn, 1.0 / max(drawn, 1))
        chunk = max(1000, int(1.5 * (n - got) / rate))
    return np.concatenate(accepted)[:n]


def abduct_noise(spec: SemSpec, row: np.ndarray) -> np.ndarray:
    """Exact exogenous noise recovery for one observed row."""
    d = spec.dag.d
    eps = np.empty(d)
    for i in spec.dag.topo_order:
        parents = spec.dag.parents[i]
        if not parents:
            eps[i] = row[i] / spec.scale_of(i)
            continue
        f = float(spec.mechanism_value(i, row[parents][None, :])[0])
        if spec.noise_mode == "multiplicative":
            if abs(f) < 1e-9:
                raise NearZeroMechanismError(
                    f"mechanism of node {spec.dag.node_names[i]} is ~0; "
                    "multiplicative noise is not invertible here")
            eps[i] = (row[i] / f - 1.0) / spec.sigma
        else:
            eps[i] = (row[i] - f) / spec.scale_of(i)
    return eps


def true_counterfactual(spec: SemSpec, observation: np.ndarray,
                        intervention: dict[str, float]) -> np.ndarray:
    """Exact abduction-action-prediction under the true SEM."""
    eps = abduct_noise(spec, np.asarray(observation, dtype=np.float64))
    do_idx = {spec.dag.index_of(name): float(v) for name, v in intervention.items()}
    d = spec.dag.d
    out = np.empty(d)
    for i in spec.dag.topo_order:
        if i in do_idx:
            out[i] = do_idx[i]
            continue
        parents = spec.dag.parents[i]
        if not parents:
            out[i] = spec.scale_of(i) * eps[i]
            continue
        f = float(spec.mechanism_value(i, out[parents][None, :])[0])
        if spec.noise_mode == "multiplicative":
            out[i] = f * (1.0 + spec.sigma * eps[i])
        else:
            out[i] = f + spec.scale_of(i) * eps[i]
    return out


# --- spec builders ---

def random_sem(n_nodes: int, seed: int, mean_parents: float = 2.0,
               mechanism_pool: tuple = ("linear", "tanh", "quadratic", "sine"),
               noise_pool: tuple = (("gaussian",), ("laplace",)),
               noise_mode: str = "additive", sigma: float = 0.1,
               nonroot_noise_scale: float = 0.3, max_parents: int = 3) -> SemSpec:
    """Random SEM over a random DAG (node i may only draw parents from 0..i-1)."""
    rng = np.random.default_rng(seed)
    names = [f"X{i + 1}" for i in range(n_nodes)]
    parents: list[list[int]] = [[]]
    for i in range(1, n_nodes):
        k = min(i, max_parents, 1 + rng.poisson(max(mean_parents - 1.0, 0.0)))
        parents.append(sorted(rng.choice(i, size=k, replace=False).tolist()))
    dag = CausalDag(node_names=names, parents=parents)
    mechanisms = {}
    noise = {}
    weights = {}
    scales = {}
    for i in range(n_nodes):
        noise[i] = noise_pool[int(rng.integers(len(noise_pool)))]
        if parents[i]:
            mechanisms[i] = mechanism_pool[int(rng.integers(len(mechanism_pool)))]
            scales[i] = nonroot_noise_scale
            for p in parents[i]:
                weights[(p, i)] = float(rng.uniform(0.7, 1.3) * rng.choice([-1.0, 1.0]))
        else:
            scales[i] = 1.0
    return SemSpec(dag=dag, mechanisms=mechanisms, noise=noise, weights=weights,
                   noise_mode=noise_mode, sigma=sigma, noise_scale=scales, seed=seed)


def chain_spec(n_nodes: int = 3, mechanism: str = "mlp_silu",
               noise_mode: str = "multiplicative", sigma: float = 0.1,
               seed: int = 0) -> SemSpec:
    """Chain X1 -> X2 -> ... (the multiplicative MLP variant is the hard
    noise-inversion benchmark)."""
    names = [f"X{i + 1}" for i in range(n_nodes)]
    parents = [[]] + [[i - 1] for i in range(1, n_nodes)]
    dag = CausalDag(node_names=names, parents=parents)
    mechanisms = {i: mechanism for i in range(1, n_nodes)}
    noise = {i: ("gaussian",) for i in range(n_nodes)}
    weights = {(i - 1, i): 1.0 for i in range(1, n_nodes)}
    scales = {i: (1.0 if i == 0 else 0.3) for i in range(n_nodes)}
    return SemSpec(dag=dag, mechanisms=mechanisms, noise=noise, weights=weights,
                   noise_mode=noise_mode, sigma=sigma, noise_scale=scales, seed=seed)
