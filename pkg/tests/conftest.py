import numpy as np
import pandas as pd
import pytest

from dagsynth.dag import validate_dag
from dagsynth.model import fit_model
from dagsynth.oracle import random_sem, sample_sem


@pytest.fixture(scope="session")
def chain_model():
    """Age,Edu -> Inc -> Loan style 4-node model on tanh/linear mechanisms."""
    rng = np.random.default_rng(11)
    n = 3000
    age = rng.normal(size=n)
    edu = rng.normal(size=n)
    inc = 0.8 * age + 0.6 * edu + 0.3 * rng.normal(size=n)
    loan = np.tanh(inc) + 0.3 * rng.normal(size=n)
    df = pd.DataFrame({"Age": age, "Edu": edu, "Inc": inc, "Loan": loan})
    dag = validate_dag(["Age", "Edu", "Inc", "Loan"],
                       [("Age", "Inc"), ("Edu", "Inc"), ("Inc", "Loan")])
    model = fit_model(df, k=25, dag=dag)
    return model, df


@pytest.fixture(scope="session")
def small_sem():
    """5-node random SEM with its training data and fitted model."""
    spec = random_sem(5, seed=3)
    rng = np.random.default_rng(42)
    train = sample_sem(spec, 3000, rng)
    df = pd.DataFrame(train, columns=spec.dag.node_names)
    model = fit_model(df, k=30, dag=spec.dag)
    return spec, train, model
