"""Command-line interface.

Exit codes: 0 success, 2 infeasible constraints, 3 input error, 4 sampling
budget or retry limit exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
import pandas as pd

from . import bench
from .constraints import compile_constraint_set, feasibility_check, load_constraints
from .counterfactual import counterfactual
from .errors import BudgetError, InfeasibleError, InputError
from .generate import GenerationConfig, generate
from .model_io import fit_pipeline, load_model, save_model
from .oracle import SemSpec, sample_sem
from .uncertainty import uncertainty_report

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4

MODE_NAMES = {"backfill": "backfill", "rejection": "rejection_baseline",
              "forward": "forward_only"}


def _load_config(args) -> dict:
    config: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            config.update(json.load(fh))
    # CLI flags override the config file
    for key in ("k", "seed", "max_parents", "lambda_unsup", "lambda_div",
                "min_samples_leaf", "max_depth", "alpha_prior"):
        v = getattr(args, key, None)
        if v is not None:
            config[key] = v
    if getattr(args, "dag", None):
        config["dag_file"] = args.dag
    if getattr(args, "categorical", None):
        config["categorical"] = [c.strip() for c in args.categorical.split(",")]
    if getattr(args, "point_estimates", False):
        config["point_estimate_leaves"] = True
    return config


def cmd_fit(args) -> int:
    model = fit_pipeline(args.data, _load_config(args))
    save_model(model, args.out)
    leaves = sum(len(t.leaves) for t in model.trees)
    print(json.dumps({"out": args.out, "n_rows": model.meta["n_rows"],
                      "features": model.d, "leaves": leaves}))
    return EXIT_OK


def cmd_generate(args) -> int:
    model = load_model(args.model)
    constraints = load_constraints(args.constraints) if args.constraints else []
    cc = compile_constraint_set(constraints, model.disc,
                                exact_equality=args.exact_equality)
    cfg = GenerationConfig(n_rows=args.n, mode=MODE_NAMES[args.mode],
                           rng_seed=args.seed, n_jobs=args.jobs,
                           skip_feasibility=args.skip_feasibility,
                           max_row_retries=args.max_row_retries)
    df, report = generate(model, cc, cfg)
    df.to_csv(args.out, index=False)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report.to_obj(), fh, indent=2)
    print(json.dumps(report.to_obj()))
    return EXIT_OK


def cmd_uncertainty(args) -> int:
    model = load_model(args.model)
    df = pd.read_csv(args.data)
    report = uncertainty_report(model, df, per_cell=args.per_cell)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
    print(json.dumps({k: report[k] for k in ("n_rows", "total", "aleatoric", "epistemic")}))
    return EXIT_OK


def cmd_counterfactual(args) -> int:
    model = load_model(args.model)
    with open(args.obs) as fh:
        obs_map = json.load(fh)
    obs = [obs_map[name] for name in model.disc.names]
    intervention = json.loads(args.do)
    row = counterfactual(model, obs, intervention, bin_only=args.bin_only)
    result = {name: (v if isinstance(v, str) else float(v))
              for name, v in zip(model.disc.names, row)}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(result, fh, indent=2)
    print(json.dumps(result))
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec = SemSpec.from_json(args.spec)
    data = sample_sem(spec, args.n, np.random.default_rng(args.seed))
    pd.DataFrame(data, columns=spec.dag.node_names).to_csv(args.out, index=False)
    print(json.dumps({"out": args.out, "n": args.n, "nodes": spec.dag.d}))
    return EXIT_OK


def cmd_check_feasibility(args) -> int:
    model = load_model(args.model)
    constraints = load_constraints(args.constraints)
    cc = compile_constraint_set(constraints, model.disc)
    report = feasibility_check(cc, model.disc, model.dag)
    print(json.dumps(report.to_obj(), indent=2))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_benchmark(args) -> int:
    cells = bench.run_benchmark_grid(
        nodes=tuple(int(x) for x in args.nodes.split(",")),
        strictness=tuple(args.strictness.split(",")),
        ctypes=tuple(args.types.split(",")),
        seeds=tuple(range(args.seeds)),
        n_train=args.n_train, n_gen=args.n_gen,
        run_rejection=not args.skip_rejection)
    frame = bench.cells_to_frame(cells)
    frame.to_csv(args.out, index=False)
    print(frame.to_string(index=False))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dagsynth",
                                 description="constrained tabular synthesis over a DAG of Bayesian trees")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model from a CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dag", help="JSON DAG file; omit to learn the structure heuristically")
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-parents", dest="max_parents", type=int)
    p.add_argument("--categorical", help="comma-separated columns forced categorical")
    p.add_argument("--lambda-unsup", dest="lambda_unsup", type=float)
    p.add_argument("--lambda-div", dest="lambda_div", type=float)
    p.add_argument("--min-samples-leaf", dest="min_samples_leaf", type=int)
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--alpha-prior", dest="alpha_prior", type=float)
    p.add_argument("--point-estimates", dest="point_estimates", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("generate", help="generate rows from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--constraints")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=sorted(MODE_NAMES), default="backfill")
    p.add_argument("--report")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-row-retries", dest="max_row_retries", type=int, default=64)
    p.add_argument("--skip-feasibility", action="store_true")
    p.add_argument("--exact-equality", dest="exact_equality", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("uncertainty", help="entropy decomposition over a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--per-cell", dest="per_cell", action="store_true")
    p.set_defaults(func=cmd_uncertainty)

    p = sub.add_parser("counterfactual", help="abduction-action-prediction query")
    p.add_argument("--model", required=True)
    p.add_argument("--obs", required=True, help="JSON file mapping feature -> observed value")
    p.add_argument("--do", required=True, help="JSON object of do-assignments")
    p.add_argument("--bin-only", dest="bin_only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser("oracle", help="sample ground-truth data from an SEM spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check-feasibility", help="static constraint feasibility report")
    p.add_argument("--model", required=True)
    p.add_argument("--constraints", required=True)
    p.set_defaults(func=cmd_check_feasibility)

    p = sub.add_parser("benchmark", help="oracle/fit/generate/metrics grid")
    p.add_argument("--out", required=True)
    p.add_argument("--nodes", default="5,10")
    p.add_argument("--strictness", default="easy,medium,hard")
    p.add_argument("--types", default="range,equality,intercol,mixed")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--n-train", dest="n_train", type=int, default=3000)
    p.add_argument("--n-gen", dest="n_gen", type=int, default=1000)
    p.add_argument("--skip-rejection", dest="skip_rejection", action="store_true")
    p.set_defaults(func=cmd_benchmark)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
