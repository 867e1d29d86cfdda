"""Command-line interface: ``netgramian <subcommand> ...``.

Node indices on the command line are 0-based, as in the library.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys

import numpy as np

from . import cheeger, experiments
from .errors import NetGramianError
from .gramian import ControlSystem, energy_bound, gramian, min_energy_input
from .graph_models import GraphModelConfig, build_pipeline, make_rng
from .matrix_core import read_matrix, stability_report, write_matrix
from .spectral import is_reversible, leading_eigenpair


def _kv(key, value):
    if isinstance(value, float):
        value = f"{value:.12g}"
    print(f"{key}: {value}")


def _is_stochastic(A):
    return bool(np.max(np.abs(A.sum(axis=0) - 1.0)) <= 1e-10)


def cmd_analyze(args):
    A = read_matrix(args.matrix)
    rep = stability_report(A)
    S = leading_eigenpair(A)
    _kv("n", A.shape[0])
    _kv("irreducible", rep.irreducible)
    _kv("marginally_stable", rep.marginally_stable)
    _kv("strictly_stable", rep.strictly_stable)
    _kv("spectral_radius", rep.spectral_radius)
    _kv("product_pattern_primitive", rep.product_pattern_primitive)
    _kv("lambda1", S.lambda1)
    _kv("sigma2", S.sigma2)
    _kv("heterogeneity", S.heterogeneity)
    _kv("reversible", is_reversible(A, S) if _is_stochastic(A) else "n/a")
    _kv("spectral_gap", S.spectral_gap)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["node", "v", "w", "pi"])
            for i in range(S.n):
                writer.writerow([i, f"{S.v[i]:.17g}", f"{S.w[i]:.17g}", f"{S.pi[i]:.17g}"])
    return 0


def cmd_gramian(args):
    A = read_matrix(args.matrix)
    S = leading_eigenpair(A)
    n = A.shape[0]
    if args.controls in experiments.STRATEGIES:
        if args.m is None:
            raise NetGramianError("--controls HCN|LCN|RN requires --m")
        K = experiments.place_controls(S.v, args.m, args.controls, make_rng(args.seed))
    else:
        K = tuple(int(x) for x in args.controls.split(",") if x.strip())
    sys_ = ControlSystem(A, K)
    res = gramian(sys_, args.horizon, v=S.v)
    _kv("controls", ",".join(map(str, K)))
    _kv("T", args.horizon)
    _kv("lambda_min", res.lambda_min)
    _kv("lambda_min_restricted", res.lambda_min_restricted)
    _kv("converged", res.converged)
    if args.target:
        x_f = np.loadtxt(args.target, ndmin=1)
        _, energy = min_energy_input(sys_, args.horizon, x_f)
        _kv("energy", energy)
    try:
        bound = energy_bound(S.heterogeneity, S.sigma2, n, len(K))
        _kv("bound", bound)
        _kv("bound_over_lambda_min", bound / res.lambda_min if res.lambda_min > 0 else math.inf)
    except NetGramianError as exc:
        _kv("bound", f"undefined ({exc})")
    return 0


def cmd_bound(args):
    A = read_matrix(args.matrix)
    S = leading_eigenpair(A)
    n = A.shape[0]
    _kv("heterogeneity", S.heterogeneity)
    _kv("sigma2", S.sigma2)
    _kv("exponent_n_over_m", n / args.m)
    _kv("bound", energy_bound(S.heterogeneity, S.sigma2, n, args.m))
    return 0


def cmd_generate(args):
    cfg = GraphModelConfig(args.model, n=args.n, d=args.d, c=args.c, k=args.k, dim=args.dim,
                           weight_range=(args.a, args.b), weight_mode=args.weights,
                           alpha=args.alpha, seed=args.seed)
    pipe = build_pipeline(cfg)
    write_matrix(args.out, pipe.C)
    if args.adj:
        write_matrix(args.adj, pipe.adj)
    if args.stochastic:
        write_matrix(args.stochastic, pipe.A)
    if args.lazy:
        write_matrix(args.lazy, pipe.A_alpha)
    _kv("n", pipe.C.shape[0])
    _kv("edges", int(np.count_nonzero(np.triu(pipe.adj, 1))))
    return 0


def cmd_cheeger(args):
    A = read_matrix(args.matrix)
    S = leading_eigenpair(A)
    rep = cheeger.bottleneck_ratio(A, S)
    _kv("h", rep.h)
    _kv("argmin_cut", ",".join(map(str, rep.argmin_S)))
    _kv("lambda2_bound", rep.lambda2_bound)
    if is_reversible(A, S):
        lambda2, _, ok = cheeger.cheeger_gap_check(A, S)
        _kv("lambda2", lambda2)
        _kv("cheeger_satisfied", ok)
    else:
        _kv("lambda2", "n/a (not reversible)")
    if args.weights and args.adj:
        C = read_matrix(args.weights)
        adj = read_matrix(args.adj)
        _kv("h_lower", cheeger.weighted_cut_bounds(C, adj, args.a, args.b))
    return 0


def _grid(text):
    return tuple(int(x) for x in text.split(",")) if text else None


def cmd_ensemble(args):
    cfg = experiments.ExperimentConfig.from_preset(
        args.preset, n_grid=_grid(args.n_grid), realizations=args.realizations,
        master_seed=args.seed)
    result = experiments.run_ensemble(cfg, out=args.out, threads=args.threads, timing=args.timing)
    _kv("records", len(result.records))
    _kv("failed", sum(1 for r in result.records if r.error))
    _kv("summary", f"{args.out}.summary.csv")
    return 0


def cmd_scaling(args):
    cfg = experiments.ExperimentConfig.from_preset(
        args.preset, n_grid=_grid(args.n_grid), realizations=args.realizations,
        master_seed=args.seed, schedule=args.schedule)
    rows = experiments.scaling_study(cfg, out=args.out, threads=args.threads)
    for row in rows:
        print(f"n={row.n} m={row.m} mean_log_bound={row.mean_log_bound:.6g} "
              f"stderr={row.stderr_log_bound:.3g}")
    _kv("strictly_decreasing", experiments.strictly_decreasing(r.mean_log_bound for r in rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netgramian", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", help="Perron data, sigma2 and heterogeneity of a matrix")
    s.add_argument("matrix")
    s.add_argument("--csv", help="write v, w, pi columns to this file")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("gramian", help="Gramian minimum eigenvalue, energy and bound")
    s.add_argument("matrix")
    s.add_argument("--controls", required=True, help="comma list of nodes, or HCN|LCN|RN")
    s.add_argument("--m", type=int, help="control-set size for strategy placement")
    s.add_argument("--horizon", "-T", type=int, required=True)
    s.add_argument("--target", help="file holding the target state x_f")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_gramian)

    s = sub.add_parser("bound", help="ingredients of the energy bound")
    s.add_argument("matrix")
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("generate", help="write a random network weight matrix")
    s.add_argument("--model", choices=["BA", "ER", "KARY"], required=True)
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--c", type=float, default=4.0)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--a", type=float, default=0.5)
    s.add_argument("--b", type=float, default=2.0)
    s.add_argument("--weights", choices=["symmetric", "asymmetric"], default="symmetric")
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="weight matrix C")
    s.add_argument("--adj", help="also write the 0/1 adjacency")
    s.add_argument("--stochastic", help="also write A = C diag(1^T C)^-1")
    s.add_argument("--lazy", help="also write the lazy matrix")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("cheeger", help="bottleneck ratio and Cheeger bound")
    s.add_argument("matrix", help="column-stochastic matrix")
    s.add_argument("--weights", help="symmetric weight matrix C for the a/b lower bound")
    s.add_argument("--adj", help="0/1 adjacency for the a/b lower bound")
    s.add_argument("--a", type=float, default=0.5)
    s.add_argument("--b", type=float, default=2.0)
    s.set_defaults(func=cmd_cheeger)

    for name, func in (("ensemble", cmd_ensemble), ("scaling", cmd_scaling)):
        s = sub.add_parser(name, help=f"run a seeded {name} experiment")
        s.add_argument("--preset", choices=sorted(experiments.PRESETS), required=True)
        s.add_argument("--n-grid", help="comma list of node counts")
        s.add_argument("--realizations", type=int)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out", required=True)
        s.add_argument("--threads", type=int, default=None,
                       help=f"worker processes (default ${experiments.THREADS_ENV} or 1)")
        if name == "ensemble":
            s.add_argument("--no-timing", dest="timing", action="store_false",
                           help="write runtime_ms as 0 for byte-reproducible output")
        else:
            s.add_argument("--schedule", choices=experiments.SCHEDULES)
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (NetGramianError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
