"""Constrained synthetic tabular data from a DAG of Bayesian decision trees."""

from .constraints import (
    CompiledConstraints,
    Equality,
    Inequality,
    InterColumn,
    Range,
    compile_constraint_set,
    feasibility_check,
    parse_constraints,
)
from .counterfactual import abduce, counterfactual, predict_counterfactual
from .dag import CausalDag, learn_structure_heuristic, reverse_topo, validate_dag
from .discretize import Discretizer, bin_dataset, fit_discretizer
from .generate import GenerationConfig, generate, masked_sample
from .kernels import BACKEND
from .model import Model, fit_model
from .model_io import fit_pipeline, load_model, save_model
from .oracle import SemSpec, ground_truth_constrained, sample_sem, true_counterfactual
from .tree import Hyperparams, fit_tree
from .uncertainty import aleatoric_entropy, epistemic_entropy, total_entropy

__version__ = "0.1.0"
