"""Command-line front end: single solves, constraint sweeps, illuminance
heatmaps, and baseline comparison tables.

Exit codes: 0 feasible solve, 2 config parse error, 3 infeasible,
4 not converged. Sweeps record infeasible points as flagged rows instead of
aborting. All floats print with 9 significant digits.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys

from . import baselines, solver
from .config import load_scenario
from .errors import ConvergenceError, InfeasibleScenarioError, ScenarioError
from .photometrics import heatmap_grid
from .report import round9

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NOT_CONVERGED = 4

ALGORITHMS = ("lxyu", "lxyo", "lca", "oracle")


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _solver_config(base, args):
    overrides = {}
    if getattr(args, "gamma", None) is not None:
        overrides["gamma"] = args.gamma
    if getattr(args, "max_outer", None) is not None:
        overrides["max_outer"] = args.max_outer
    return dataclasses.replace(base, **overrides) if overrides else base


def _run_algorithm(name, scenario, cfg, oracle_step):
    if name == "lxyu":
        return solver.lxyu(scenario, cfg)
    if name == "lxyo":
        return baselines.lxyo(scenario, cfg)
    if name == "lca":
        return baselines.lca(scenario, cfg)
    if name == "oracle":
        return baselines.oracle_grid_search(scenario, oracle_step, cfg)
    raise ValueError(f"unknown algorithm {name!r}")


def _write(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    scenario, cfg = load_scenario(args.config)
    cfg = _solver_config(cfg, args)
    try:
        solution = _run_algorithm(args.algorithm, scenario, cfg, args.step)
    except InfeasibleScenarioError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    _write(solution.to_json(), args.out)
    if not solution.feasible:
        print("solution violates the scenario constraints", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not solution.converged:
        print("solver stopped before convergence; report holds the best iterate",
              file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


_AXIS_FIELD = {"rate": "rate_min", "illum": "illum_min", "uniformity": "uniformity_max"}


def cmd_sweep(args) -> int:
    scenario, cfg = load_scenario(args.config)
    cfg = _solver_config(cfg, args)
    if not args.to > args.from_:
        print("--from must be strictly less than --to", file=sys.stderr)
        return EXIT_PARSE
    if args.steps < 2:
        print("--steps must be at least 2", file=sys.stderr)
        return EXIT_PARSE
    values = [args.from_ + k * (args.to - args.from_) / (args.steps - 1)
              for k in range(args.steps)]

    rows = []
    for value in values:
        point = scenario.with_constraints(**{_AXIS_FIELD[args.axis]: value})
        for name in args.algorithms:
            try:
                sol = _run_algorithm(name, point, cfg, args.step)
                iters = sol.iterations.get("outer",
                                           sol.iterations.get("fixed_point_passes", 0))
                rows.append((value, name, sol.sum_power, sol.cv_rmse,
                             int(sol.feasible), iters))
            except (InfeasibleScenarioError, ConvergenceError):
                rows.append((value, name, None, None, 0, 0))
    rows.sort(key=lambda r: (r[0], args.algorithms.index(r[1])))

    lines = ["axis,value,algorithm,sum_power,cv_rmse,feasible,iterations"]
    for value, name, sum_power, cv, feasible, iters in rows:
        lines.append(",".join([
            args.axis, _fmt(float(value)), name, _fmt(sum_power), _fmt(cv),
            str(feasible), str(iters),
        ]))
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_heatmap(args) -> int:
    scenario, cfg = load_scenario(args.config)
    cfg = _solver_config(cfg, args)
    try:
        solution = _run_algorithm(args.algorithm, scenario, cfg, args.step)
    except InfeasibleScenarioError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    xs, ys, eta = heatmap_grid(solution.layout, scenario.room, scenario.params,
                               args.resolution)
    lines = [f"# algorithm={solution.algorithm} cv_rmse={_fmt(round9(solution.cv_rmse))}",
             "x,y,illuminance"]
    for ix, x in enumerate(xs):
        for iy, y in enumerate(ys):
            lines.append(f"{_fmt(float(x))},{_fmt(float(y))},{_fmt(float(eta[ix, iy]))}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_NOT_CONVERGED if not solution.converged else EXIT_OK


def cmd_compare(args) -> int:
    scenario, cfg = load_scenario(args.config)
    cfg = _solver_config(cfg, args)
    results = {}
    for name in ("lca", "lxyo", "lxyu"):
        try:
            results[name] = _run_algorithm(name, scenario, cfg, args.step)
        except (InfeasibleScenarioError, ConvergenceError) as exc:
            results[name] = exc

    lines = ["algorithm,sum_power,cv_rmse,savings_vs_lca_pct,feasible"]
    lca_power = None
    sol = results.get("lca")
    if not isinstance(sol, Exception):
        lca_power = sol.sum_power
    for name in ("lca", "lxyo", "lxyu"):
        sol = results[name]
        if isinstance(sol, Exception):
            lines.append(f"{name},,,,0")
            continue
        savings = None
        if lca_power and lca_power > 0.0:
            savings = 100.0 * (lca_power - sol.sum_power) / lca_power
        lines.append(",".join([
            name, _fmt(sol.sum_power), _fmt(sol.cv_rmse), _fmt(savings),
            str(int(sol.feasible)),
        ]))
    _write("\n".join(lines) + "\n", args.out)
    if any(isinstance(s, Exception) for s in results.values()):
        return EXIT_INFEASIBLE
    return EXIT_OK


def _add_common(p):
    p.add_argument("--config", required=True, help="scenario config file")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--gamma", type=float, default=None,
                   help="override the subgradient step-size scale")
    p.add_argument("--max-outer", type=int, default=None,
                   help="override the outer iteration budget")
    p.add_argument("--seed", type=int, default=None,
                   help="reserved; the solver is deterministic")
    p.add_argument("--step", type=float, default=0.05,
                   help="oracle grid-search spacing step in meters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vlcplace",
        description="Power-minimizing indoor LED placement for VLC")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one algorithm and write its report")
    _add_common(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="lxyu")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="sweep one constraint axis, write a CSV")
    _add_common(p)
    p.add_argument("--axis", choices=sorted(_AXIS_FIELD), required=True)
    p.add_argument("--from", dest="from_", type=float, required=True)
    p.add_argument("--to", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--algorithms", nargs="+", choices=ALGORITHMS,
                   default=["lca", "lxyo", "lxyu"])
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("heatmap", help="solve, then export the illuminance grid")
    _add_common(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="lxyu")
    p.add_argument("--resolution", type=int, default=50)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("compare", help="run lca/lxyo/lxyu and tabulate savings")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
