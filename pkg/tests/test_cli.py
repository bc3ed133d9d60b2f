import json

import numpy as np
import pandas as pd
import pytest

from dagsynth.cli import main
from dagsynth.oracle import random_sem


@pytest.fixture()
def workspace(tmp_path):
    rng = np.random.default_rng(0)
    n = 600
    x1 = rng.normal(size=n)
    x2 = np.tanh(x1) + 0.3 * rng.normal(size=n)
    x3 = 0.5 * x2 + 0.3 * rng.normal(size=n)
    pd.DataFrame({"X1": x1, "X2": x2, "X3": x3}).to_csv(tmp_path / "train.csv",
                                                        index=False)
    (tmp_path / "dag.json").write_text(json.dumps(
        {"nodes": ["X1", "X2", "X3"], "edges": [["X1", "X2"], ["X2", "X3"]]}))
    (tmp_path / "loose.json").write_text(json.dumps(
        [{"type": "range", "feature": "X3", "low": 0.0}]))
    (tmp_path / "impossible.json").write_text(json.dumps(
        [{"type": "range", "feature": "X3", "low": 10.0, "high": 20.0}]))
    return tmp_path


def fit(ws):
    rc = main(["fit", "--data", str(ws / "train.csv"), "--out", str(ws / "m.json"),
               "--dag", str(ws / "dag.json"), "--k", "12", "--seed", "1"])
    assert rc == 0
    return ws / "m.json"


class TestWorkflow:
    def test_fit_generate_uncertainty_counterfactual(self, workspace, capsys):
        model = fit(workspace)
        rc = main(["generate", "--model", str(model), "--out",
                   str(workspace / "out.csv"), "--constraints",
                   str(workspace / "loose.json"), "--n", "80", "--seed", "3",
                   "--report", str(workspace / "rep.json")])
        assert rc == 0
        out = pd.read_csv(workspace / "out.csv")
        assert len(out) == 80 and (out["X3"] >= 0).all()
        rep = json.loads((workspace / "rep.json").read_text())
        assert rep["csr"] == 1.0

        rc = main(["uncertainty", "--model", str(model), "--data",
                   str(workspace / "train.csv"), "--out", str(workspace / "unc.json")])
        assert rc == 0
        unc = json.loads((workspace / "unc.json").read_text())
        assert unc["total"] == pytest.approx(unc["aleatoric"] + unc["epistemic"])

        (workspace / "obs.json").write_text(json.dumps(
            {"X1": 0.1, "X2": 0.2, "X3": 0.15}))
        rc = main(["counterfactual", "--model", str(model), "--obs",
                   str(workspace / "obs.json"), "--do", '{"X1": 0.8}'])
        assert rc == 0
        line = capsys.readouterr().out.strip().splitlines()[-1]
        cf = json.loads(line)
        assert set(cf) == {"X1", "X2", "X3"}
        assert cf["X1"] == pytest.approx(0.8)

    def test_generate_modes(self, workspace):
        model = fit(workspace)
        for mode in ("backfill", "rejection", "forward"):
            rc = main(["generate", "--model", str(model), "--out",
                       str(workspace / f"{mode}.csv"), "--constraints",
                       str(workspace / "loose.json"), "--n", "40", "--mode", mode])
            assert rc == 0
            out = pd.read_csv(workspace / f"{mode}.csv")
            assert (out["X3"] >= 0).all()

    def test_oracle_subcommand(self, workspace):
        spec = random_sem(4, seed=1)
        (workspace / "spec.json").write_text(json.dumps(spec.to_obj()))
        rc = main(["oracle", "--spec", str(workspace / "spec.json"), "--n", "120",
                   "--out", str(workspace / "sem.csv"), "--seed", "2"])
        assert rc == 0
        data = pd.read_csv(workspace / "sem.csv")
        assert data.shape == (120, 4)

    def test_benchmark_smoke(self, workspace):
        rc = main(["benchmark", "--out", str(workspace / "bench.csv"),
                   "--nodes", "5", "--strictness", "easy", "--types", "range",
                   "--seeds", "1", "--n-train", "600", "--n-gen", "60"])
        assert rc == 0
        frame = pd.read_csv(workspace / "bench.csv")
        assert len(frame) == 1
        assert frame["csr_backfill"].iloc[0] == 1.0


class TestExitCodes:
    def test_infeasible_constraints_exit_2(self, workspace):
        model = fit(workspace)
        rc = main(["generate", "--model", str(model), "--out",
                   str(workspace / "x.csv"), "--constraints",
                   str(workspace / "impossible.json"), "--n", "5"])
        assert rc == 2

    def test_check_feasibility_exit_codes(self, workspace):
        model = fit(workspace)
        assert main(["check-feasibility", "--model", str(model), "--constraints",
                     str(workspace / "loose.json")]) == 0
        assert main(["check-feasibility", "--model", str(model), "--constraints",
                     str(workspace / "impossible.json")]) == 2

    def test_missing_model_exit_3(self, workspace):
        rc = main(["generate", "--model", str(workspace / "nope.json"), "--out",
                   str(workspace / "x.csv"), "--n", "5"])
        assert rc == 3

    def test_corrupt_model_exit_3(self, workspace):
        bad = workspace / "bad.json"
        bad.write_text("{not json")
        rc = main(["generate", "--model", str(bad), "--out",
                   str(workspace / "x.csv"), "--n", "5"])
        assert rc == 3

    def test_budget_exhausted_exit_4(self, workspace):
        model = fit(workspace)
        rc = main(["generate", "--model", str(model), "--out",
                   str(workspace / "x.csv"), "--constraints",
                   str(workspace / "impossible.json"), "--n", "5",
                   "--mode", "rejection", "--skip-feasibility"])
        assert rc == 4
