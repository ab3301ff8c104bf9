"""Command-line entry point.

Every command prints one JSON report on stdout and a short summary on
stderr. Exit codes: 0 success / not falsified / solution found, 1 falsified /
not a solution / no convergence, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .errors import DocumentError, TviError
from .games import best_response_grid, cost, to_tvi, verify_nash
from .problem import natural_residual, verify_solution
from .solvers import SolverParams, gus_probe, solve
from .structure import check_pd_on, check_spd_on, estimate_strong_modulus

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(TviError):
    pass


def parse_vector(text: str) -> np.ndarray:
    """``"1,2.5,-3"`` or a JSON array."""
    text = text.strip()
    try:
        vals = json.loads(text) if text.startswith("[") else [float(t) for t in text.split(",") if t.strip()]
        x = np.array(vals, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise InputError(f"cannot parse vector {text!r}: {exc}") from None
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise InputError(f"vector {text!r} must be a flat list of finite numbers")
    return x


def _vec(x) -> list[float]:
    return [float(v) for v in np.asarray(x).ravel()]


def _params(args) -> SolverParams:
    return SolverParams(max_iters=args.max_iters, tol=args.tol, initial_step=args.step, seed=args.seed)


def _verdict(v) -> dict:
    if v.falsified:
        return {"verdict": "Falsified", "witness": [_vec(w) for w in v.witness],
                "value": v.value, "samples_tested": v.samples_tested}
    return {"verdict": "NotFalsified", "samples_tested": v.samples_tested}


def _solve_report(r) -> dict:
    return {"status": r.status.value, "x": _vec(r.x), "residual": r.residual,
            "iterations": r.iterations, "projected_start": r.projected_start}


def cmd_solve(args):
    P = io.load_problem(args.problem)
    x0 = parse_vector(args.x0) if args.x0 else None
    r = solve(P, x0, _params(args), args.method)
    out = {"method": args.method, **_solve_report(r)}
    if args.trace:
        out["residual_trace"] = r.residual_trace
    return out, EXIT_OK if r.converged else EXIT_FAIL, f"{r.status.value} after {r.iterations} iterations, residual {r.residual:.3e}"


def cmd_verify(args):
    P = io.load_problem(args.problem)
    rep = verify_solution(P, parse_vector(args.x), args.tol)
    out = {"is_solution": rep.is_solution, "residual": rep.residual, "feasible": rep.feasible,
           "F_at_x": _vec(rep.F_at_x)}
    return out, EXIT_OK if rep.is_solution else EXIT_FAIL, ("solution" if rep.is_solution else "not a solution") + f", residual {rep.residual:.3e}"


def cmd_residual(args):
    P = io.load_problem(args.problem)
    r = natural_residual(P, parse_vector(args.x))
    return {"residual": r}, EXIT_OK if r <= args.tol else EXIT_FAIL, f"natural residual {r:.6e}"


def cmd_check_pd(args):
    P = io.load_problem(args.problem)
    probes = [parse_vector(args.x)] if args.x else []
    v = check_pd_on(P.A, P.X, args.samples, args.seed, probes)
    return _verdict(v), EXIT_FAIL if v.falsified else EXIT_OK, _summary(v)


def _pair_probe(args):
    if bool(args.x) != bool(args.y):
        raise InputError("--x and --y must be given together")
    return [(parse_vector(args.x), parse_vector(args.y))] if args.x else []


def cmd_check_spd(args):
    P = io.load_problem(args.problem)
    v = check_spd_on(P.A, P.X, args.samples, args.seed, _pair_probe(args))
    return _verdict(v), EXIT_FAIL if v.falsified else EXIT_OK, _summary(v)


def _summary(v) -> str:
    if v.falsified:
        return f"Falsified: value {v.value!r} after {v.samples_tested} samples"
    return f"NotFalsified over {v.samples_tested} samples"


def cmd_modulus(args):
    P = io.load_problem(args.problem)
    est = estimate_strong_modulus(P, args.samples, args.seed, _pair_probe(args))
    out = {"c_hat": est.c_hat, "argmin_pair": [_vec(p) for p in est.argmin_pair],
           "samples_tested": est.samples_tested}
    return out, EXIT_OK, f"smallest observed modulus {est.c_hat:.6g}"


def cmd_game_compile(args):
    G = io.load_game(args.game)
    P = to_tvi(G)
    return {"problem": io.problem_to_doc(P, dense=args.dense)}, EXIT_OK, f"compiled {G.players}-player game to order {P.m}, dimension {P.n}"


def cmd_game_solve(args):
    G = io.load_game(args.game)
    P = to_tvi(G)
    x0 = parse_vector(args.x0) if args.x0 else None
    r = solve(P, x0, _params(args), args.method)
    nash = verify_nash(G, r.x, args.tol)
    out = {"method": args.method, **_solve_report(r), "blocks": [_vec(b) for b in G.blocks(r.x)],
           "is_equilibrium": nash.is_equilibrium, "per_player_residuals": nash.per_player_residuals}
    ok = r.converged and nash.is_equilibrium
    return out, EXIT_OK if ok else EXIT_FAIL, f"{r.status.value}; equilibrium: {nash.is_equilibrium}"


def cmd_game_verify(args):
    G = io.load_game(args.game)
    x = parse_vector(args.x)
    nash = verify_nash(G, x, args.tol)
    out = {"is_equilibrium": nash.is_equilibrium, "per_player_residuals": nash.per_player_residuals,
           "costs": [cost(G, k, x) for k in range(G.players)]}
    if args.grid:
        out["best_responses"] = [_vec(best_response_grid(G, k, x, args.grid)) for k in range(G.players)]
    return out, EXIT_OK if nash.is_equilibrium else EXIT_FAIL, f"equilibrium: {nash.is_equilibrium}"


def cmd_gus_probe(args):
    P = io.load_problem(args.problem)
    res = gus_probe(P, args.starts, args.spread, _params(args))
    out = {
        "clusters": [{"center": _vec(c.center), "count": c.count, "members": c.members} for c in res.clusters],
        "failed": [{"start": i, "status": r.status.value, "residual": r.residual} for i, r in res.failed],
        "residuals": [r.residual for r in res.reports],
        "cluster_radius": res.radius,
        "unique": res.unique,
    }
    return out, EXIT_OK if res.unique else EXIT_FAIL, f"{len(res.clusters)} cluster(s), {len(res.failed)} failed run(s)"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorvi",
        description="Solve and analyze tensor variational inequalities. Reports are JSON on stdout.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--seed", type=int, default=0)

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--max-iters", type=int, default=100_000)
    solving.add_argument("--step", type=float, default=1.0, help="initial step size")
    solving.add_argument("--method", choices=["extragradient", "fixed-point"], default="extragradient")
    solving.add_argument("--x0", help="starting point (default: origin, projected)")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--samples", type=int, default=10_000)

    def add(name, func, parents, problem=True, help=None):
        p = sub.add_parser(name, parents=[common, *parents], help=help)
        if problem:
            p.add_argument("--problem", required=True, help="problem document (JSON)")
        else:
            p.add_argument("--game", required=True, help="game document (JSON)")
        p.set_defaults(func=func)
        return p

    p = add("solve", cmd_solve, [solving], help="solve a TVI")
    p.add_argument("--trace", action="store_true", help="include the residual trace")
    add("verify", cmd_verify, [], help="check a candidate solution").add_argument("--x", required=True)
    add("residual", cmd_residual, [], help="natural residual at a point").add_argument("--x", required=True)
    add("check-pd", cmd_check_pd, [sampling], help="falsify positive definiteness on X").add_argument(
        "--x", help="extra probe point, tried first")
    for name, func, text in (("check-spd", cmd_check_spd, "falsify strict positive definiteness on X"),
                             ("modulus", cmd_modulus, "estimate the strong monotonicity modulus")):
        p = add(name, func, [sampling], help=text)
        p.add_argument("--x", help="probe pair, first point")
        p.add_argument("--y", help="probe pair, second point")
    p = add("game-compile", cmd_game_compile, [], problem=False, help="reduce a game to a TVI document")
    p.add_argument("--dense", action="store_true")
    p = add("game-solve", cmd_game_solve, [solving], problem=False, help="compute a Nash equilibrium")
    p = add("game-verify", cmd_game_verify, [], problem=False, help="check a strategy profile")
    p.add_argument("--x", required=True)
    p.add_argument("--grid", type=int, default=0, help="also report grid best responses")
    p = add("gus-probe", cmd_gus_probe, [solving], help="multi-start uniqueness probe")
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--spread", type=float, default=10.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    echo = {k: v for k, v in vars(args).items() if k != "func"}
    try:
        out, code, summary = args.func(args)
    except (OSError, TviError, ValueError, TypeError, IndexError) as exc:
        report = {"command": args.command, "inputs": echo, "error": str(exc)}
        if isinstance(exc, DocumentError):
            report["pointer"] = exc.pointer
        print(json.dumps(report))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {"command": args.command, "inputs": echo, "tol": args.tol, "seed": args.seed, **out}
    print(json.dumps(report))
    print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
