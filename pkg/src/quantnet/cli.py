"""Command-line interface.

Subcommands: plan, solve, oracle-check, alpha-star, reproduce, sweep.
Exit codes: 0 success, 1 check/acceptance failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .graph import Graph, build_laplacian, generate_graph, load_graph
from .harness import (builtin_graph, builtin_problem, load_config, reproduce,
                      run_config, random_problem)
from .oracle import (compact_exact_init, compact_exact_step, compact_ls_init,
                     compact_ls_step, make_exact_operators, make_ls_operators)
from .planner import (alpha_star, plan_exact, plan_ls, spectral_data,
                      xi_membership, xi_ls_membership)
from .problem import (LinearProblem, build_stacked, classify, load_problem,
                      theta_n)
from .solver import GammaSchedule


def _load_named_problem(spec: str) -> LinearProblem:
    if spec in ("ex1", "ex4"):
        return builtin_problem(spec)
    return load_problem(spec)


def _load_named_graph(spec: str) -> Graph:
    if spec == "fig1":
        return builtin_graph()
    return load_graph(spec)


def _spectral(problem: LinearProblem, graph: Graph):
    lap = build_laplacian(graph)
    ops = build_stacked(problem, lap)
    return lap, ops, spectral_data(ops, lap, problem.dim, problem.n_nodes)


def _cmd_plan(args) -> int:
    p = _load_named_problem(args.problem)
    g = _load_named_graph(args.graph)
    _, _, sp = _spectral(p, g)
    rows = []
    if args.kind == "exact":
        plan = plan_exact(args.K, args.eps, sp, cx=args.cx, cw=args.cw,
                          pick_fraction=args.pick_fraction)
        report = {
            "kind": "exact", "K": args.K, "eps": plan.eps, "h": plan.h,
            "alpha": plan.alpha, "rho_h": plan.rho_h, "M": plan.M,
            "Kmin_raw": plan.Kmin_raw, "Kmin": plan.Kmin,
            "h_star": plan.h_star, "s0_min": plan.s0_min,
            "membership": xi_membership(plan.alpha, plan.h, args.K, sp),
        }
        rows.append(("exact", args.K, plan.eps, plan.h, plan.alpha, plan.M,
                     plan.Kmin, plan.s0_min, report["membership"]))
    else:
        plan = plan_ls(args.K, args.eps, sp, delta=args.delta,
                       cx=args.cx or 0.0, pick_fraction=args.pick_fraction)
        report = {
            "kind": "ls", "K": args.K, "eps": plan.eps, "h": plan.h,
            "beta0": plan.beta0, "rho_hat": plan.rho_hat, "M1": plan.M1,
            "M2": plan.M2, "Mprime": plan.Mprime,
            "Kmin_ls_raw": plan.Kmin_ls_raw, "Kmin_ls": plan.Kmin_ls,
            "k0": plan.gamma.k0, "delta": plan.gamma.delta,
            "sr_min": plan.sr_min, "h_star": plan.h_star_ls,
            "membership": xi_ls_membership(plan.h, plan.beta0, args.K, sp,
                                           args.cx or 0.0),
        }
        rows.append(("ls", args.K, plan.eps, plan.h, plan.beta0, plan.Mprime,
                     plan.Kmin_ls, plan.sr_min, report["membership"]))
    for key, val in report.items():
        print(f"{key} = {val}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "plan.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("kind,K,eps,h,alpha_or_beta0,M,Kmin,s_bound,membership\n")
            for r in rows:
                fh.write(",".join(str(v) for v in r) + "\n")
        print(f"# wrote {path}")
    return 0 if report["membership"] else 1


def _cmd_solve(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.values["seed"] = args.seed
    if args.max_rounds is not None:
        cfg.values["max_rounds"] = args.max_rounds
    if args.strict_saturation:
        cfg.values["strict_saturation"] = True
    trace = run_config(cfg)
    out = args.out or cfg.get("out") or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "trace.csv")
    trace.save_csv(path)
    for key, val in trace.summary().items():
        print(f"{key} = {val}")
    print(f"# wrote {path}")
    return 0


def _cmd_oracle_check(args) -> int:
    cfg = load_config(args.config)
    if args.max_rounds is not None:
        cfg.values["max_rounds"] = args.max_rounds
    from .harness import build_graph, build_problem
    p = build_problem(cfg)
    g = build_graph(cfg)
    lap = build_laplacian(g)
    ops = build_stacked(p, lap)
    cls = classify(p)
    mode = cfg.get("mode")
    rounds = cfg.get("max_rounds", 300 if mode == "exact" else 2000)
    h = cfg.get("solver.h")
    K = cfg.get("solver.K")
    n, m = p.n_nodes, p.dim

    from .solver import ExactConfig, LSConfig
    if mode == "exact":
        c = ExactConfig(h=h, alpha=cfg.get("solver.alpha"),
                        s0=cfg.get("solver.s0"), K=K, max_rounds=rounds,
                        stop_tol=0.0 if rounds < 10000 else 1e-12)
        eops = make_exact_operators(ops, lap, h, cls.solution)
        # co-simulate: solver trajectory vs compact reconstruction
        dev = _exact_deviation(p, g, c, eops, rounds)
    elif mode == "ls":
        c = LSConfig(h=h, K=K, s_r=cfg.get("solver.s_r"),
                     gamma=GammaSchedule(cfg.get("gamma.k0"),
                                         cfg.get("gamma.delta")),
                     max_rounds=rounds, stop_tol=0.0)
        dev = _ls_deviation(p, g, c, ops, lap, rounds)
    else:
        print("oracle-check supports exact and ls modes only",
              file=sys.stderr)
        return 2
    print(f"max_relative_deviation = {dev:.6g}")
    tol = args.tol
    print(f"tolerance = {tol:.6g}")
    return 0 if dev <= tol else 1


def _exact_deviation(p, g, cfg, eops, rounds) -> float:
    """Max per-round relative deviation, solver vs compact recursion."""
    # step the per-node simulation manually to keep every round's state
    xs = _trajectory_exact(p, g, cfg, rounds)
    st = compact_exact_init(xs[0].reshape(-1), cfg.s0, eops)
    dev = 0.0
    for k in range(1, len(xs)):
        st = compact_exact_step(st, cfg.alpha, cfg.h, cfg.K, eops)
        xr = st.reconstruct_x(cfg.s0 * cfg.alpha ** k, eops)
        ref = np.abs(xr) + 1.0
        dev = max(dev, float(np.max(np.abs(xs[k].reshape(-1) - xr) / ref)))
    return dev


def _trajectory_exact(p, g, cfg, rounds):
    """Per-node exact-mode trajectory [x(0), ..., x(rounds)]."""
    adj = g.adjacency()
    deg = adj.sum(axis=1)
    n, m = p.n_nodes, p.dim
    x = np.zeros((n, m)) if cfg.x0 is None else np.array(cfg.x0, dtype=float)
    b = np.zeros((n, m))
    xhat = np.zeros((n, n, m))
    mask = adj[:, :, None]
    out = [x.copy()]
    for k in range(1, rounds + 1):
        s_prev = cfg.s0 * cfg.alpha ** (k - 1)
        hx = np.einsum("ij,ij->i", p.H, x)
        grad = (hx - p.z)[:, None] * p.H
        cons = xhat.sum(axis=1) - deg[:, None] * b
        x = x + cfg.h * (cons - grad)
        arg = (x - b) / s_prev
        q = np.sign(arg) * np.minimum(np.maximum(np.ceil(np.abs(arg) - 0.5),
                                                 0.0), cfg.K)
        b = s_prev * q + b
        xhat = ((s_prev * q)[None, :, :] + xhat) * mask
        out.append(x.copy())
    return out


def _ls_deviation(p, g, cfg, ops, lap, rounds) -> float:
    adj = g.adjacency()
    deg = adj.sum(axis=1)
    n, m = p.n_nodes, p.dim
    x = np.zeros((n, m)) if cfg.x0 is None else np.array(cfg.x0, dtype=float)
    b = np.zeros((n, m))
    xhat = np.zeros((n, n, m))
    mask = adj[:, :, None]
    lops = make_ls_operators(ops, lap, m)
    st = compact_ls_init(x.reshape(-1), cfg.s_r, lops)
    dev = 0.0
    for k in range(1, rounds + 1):
        g_prev = float(cfg.gamma.gamma(k - 1))
        beta_prev = float(cfg.gamma.beta(k - 1))
        s_prev = cfg.s_r * g_prev
        hx = np.einsum("ij,ij->i", p.H, x)
        grad = (hx - p.z)[:, None] * p.H
        cons = xhat.sum(axis=1) - deg[:, None] * b
        x = x + cfg.h * (cons - g_prev * grad)
        arg = (x - b) / s_prev
        q = np.sign(arg) * np.minimum(np.maximum(np.ceil(np.abs(arg) - 0.5),
                                                 0.0), cfg.K)
        b = s_prev * q + b
        xhat = ((s_prev * q)[None, :, :] + xhat) * mask
        st = compact_ls_step(st, cfg.h, cfg.s_r, g_prev, beta_prev, cfg.K,
                             lops)
        ref = np.abs(st.x) + 1.0
        dev = max(dev, float(np.max(np.abs(x.reshape(-1) - st.x) / ref)))
    return dev


def _cmd_alpha_star(args) -> int:
    if args.problem:
        p = _load_named_problem(args.problem)
    else:
        p = random_problem(args.n, args.m, "exact", args.seed or 0)
    if args.graph in ("cycle", "star", "complete"):
        g = generate_graph(args.graph, p.n_nodes)
    else:
        g = _load_named_graph(args.graph)
    lap, ops, sp = _spectral(p, g)
    theta = theta_n(ops, lap, p.dim, p.n_nodes)
    print(f"theta_n = {theta:.17g}")
    for K in args.K:
        a = alpha_star(K, sp)
        print(f"alpha_star K={K} = {a:.17g} exp(-K*theta) = "
              f"{np.exp(-K * theta):.17g}")
    return 0


def _cmd_reproduce(args) -> int:
    arts = reproduce(args.example_id, out_dir=args.out)
    for name, passed, detail in arts.checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}"
              + (f" ({detail})" if detail else ""))
    for key, val in arts.summary.items():
        print(f"{key} = {val}")
    for path in arts.trace_paths:
        print(f"# wrote {path}")
    return 0 if arts.ok else 1


def _cmd_sweep(args) -> int:
    p = random_problem(args.n, args.m, "exact", args.seed or 0)
    rows = []
    for kind in args.graph_kinds.split(","):
        g = generate_graph(kind.strip(), args.n, args.p, args.seed or 0)
        lap, ops, sp = _spectral(p, g)
        theta = theta_n(ops, lap, args.m, args.n)
        for K in args.K:
            rows.append((kind.strip(), K, theta, alpha_star(K, sp)))
    header = "graph,K,theta_n,alpha_star"
    print(header)
    for r in rows:
        print(f"{r[0]},{r[1]},{r[2]:.17g},{r[3]:.17g}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "sweep.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for r in rows:
                fh.write(f"{r[0]},{r[1]},{r[2]:.17g},{r[3]:.17g}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quantnet",
        description="Distributed linear-equation solving over quantized "
                    "finite-rate links: simulation and parameter calculus.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--strict-saturation", action="store_true")
        sp.add_argument("--max-rounds", type=int, default=None)

    sp = sub.add_parser("plan", help="compute a feasible parameter plan")
    sp.add_argument("kind", choices=["exact", "ls"])
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--delta", type=float, default=0.85)
    sp.add_argument("--cx", type=float, default=None)
    sp.add_argument("--cw", type=float, default=None)
    sp.add_argument("--pick-fraction", type=float, default=0.5)
    sp.add_argument("--problem", required=True,
                    help="problem file, or built-in name ex1/ex4")
    sp.add_argument("--graph", default="fig1",
                    help="graph file, or built-in name fig1")
    common(sp)
    sp.set_defaults(func=_cmd_plan)

    sp = sub.add_parser("solve", help="run a config file")
    sp.add_argument("config")
    common(sp)
    sp.set_defaults(func=_cmd_solve)

    sp = sub.add_parser("oracle-check",
                        help="compare a run against the matrix-form oracle")
    sp.add_argument("config")
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(func=_cmd_oracle_check)

    sp = sub.add_parser("alpha-star",
                        help="minimal scale-decay factor per alphabet size")
    sp.add_argument("--K", type=int, nargs="+", required=True)
    sp.add_argument("--problem", default=None)
    sp.add_argument("--graph", default="cycle")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--m", type=int, default=5)
    common(sp)
    sp.set_defaults(func=_cmd_alpha_star)

    sp = sub.add_parser("reproduce", help="re-run a published experiment")
    sp.add_argument("example_id",
                    choices=["ex1_thm1", "ex1_thm2", "ex2", "ex3",
                             "ex4_thm3", "ex4_thm4", "robustness"])
    common(sp)
    sp.set_defaults(func=_cmd_reproduce)

    sp = sub.add_parser("sweep",
                        help="graph-family x alphabet grid of "
                             "theta_n / alpha_star")
    sp.add_argument("--graph-kinds", default="cycle,star,complete")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--K", type=int, nargs="+", required=True)
    common(sp)
    sp.set_defaults(func=_cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
