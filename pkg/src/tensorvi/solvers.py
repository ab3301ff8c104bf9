"""Projection methods for TVI(X, A, q).

For order m > 2 the map F is not globally Lipschitz, so fixed steps are
unsafe; the extragradient method backtracks on every iteration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .problem import TviProblem, eval_map, verify_solution
from .tensor import _vector

MIN_STEP = 1e-16
DIVERGENCE_FACTOR = 10.0
# gus_probe refines converged endpoints to POLISH_FACTOR * tol before clustering
POLISH_FACTOR = 1e-3


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    LINE_SEARCH_FAILED = "LineSearchFailed"


@dataclass(frozen=True)
class SolverParams:
    max_iters: int = 100_000
    tol: float = 1e-8
    initial_step: float = 1.0
    backtrack_factor: float = 0.5
    armijo_constant: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.max_iters <= 0:
            raise ValueError("max_iters must be positive")
        if self.tol <= 0 or self.initial_step <= 0:
            raise ValueError("tol and initial_step must be positive")
        if not 0 < self.backtrack_factor < 1 or not 0 < self.armijo_constant < 1:
            raise ValueError("backtrack_factor and armijo_constant must lie in (0, 1)")


@dataclass
class SolveReport:
    status: Status
    x: np.ndarray
    residual: float
    iterations: int
    residual_trace: list[float] = field(default_factory=list)
    projected_start: bool = False
    final_step: float = float("nan")

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _start(P: TviProblem, x0, tol: float) -> tuple[np.ndarray, bool]:
    x0 = _vector(x0, P.n, "x0")
    if P.X.contains(x0, tol):
        return x0.copy(), False
    return P.X.project(x0), True


def _finish(P, x, residual, k, trace, projected, step, params) -> SolveReport:
    report = SolveReport(Status.CONVERGED, x, residual, k, trace, projected, step)
    check = verify_solution(P, x, params.tol)
    assert check.is_solution, f"converged point fails verification (residual {check.residual})"
    return report


def solve_extragradient(P: TviProblem, x0, params: SolverParams = SolverParams()) -> SolveReport:
    """Extragradient method with backtracking.

    Each iteration takes ``y = P_X(x - eta F(x))``, shrinking ``eta`` by
    ``backtrack_factor`` until ``eta ||F(x) - F(y)|| <= armijo_constant ||x - y||``,
    then sets ``x+ = P_X(x - eta F(y))``. The step is allowed to grow back by one
    factor per iteration, capped at ``initial_step``. Stops once the natural
    residual drops to ``params.tol``.
    """
    X = P.X
    x, projected = _start(P, x0, params.tol)
    eta = params.initial_step
    trace: list[float] = []
    for k in range(params.max_iters + 1):
        Fx = eval_map(P, x)
        residual = float(np.linalg.norm(x - X.project(x - Fx)))
        trace.append(residual)
        if residual <= params.tol:
            return _finish(P, x, residual, k, trace, projected, eta, params)
        if k == params.max_iters:
            break
        eta = min(params.initial_step, eta / params.backtrack_factor)
        while True:
            y = X.project(x - eta * Fx)
            Fy = eval_map(P, y)
            dx = np.linalg.norm(x - y)
            if eta * np.linalg.norm(Fx - Fy) <= params.armijo_constant * dx:
                break
            eta *= params.backtrack_factor
            if eta < MIN_STEP:
                return SolveReport(Status.LINE_SEARCH_FAILED, x, residual, k, trace, projected, eta)
        x = X.project(x - eta * Fy)
    return SolveReport(Status.MAX_ITERS, x, residual, params.max_iters, trace, projected, eta)


def solve_fixed_point(P: TviProblem, x0, params: SolverParams = SolverParams()) -> SolveReport:
    """Projected fixed-point iteration ``x+ = P_X(x - gamma F(x))``.

    ``gamma`` starts at ``initial_step`` and is multiplied by ``backtrack_factor``
    whenever the natural residual increases. A residual more than ten times its
    running minimum is treated as divergence and ends the run as ``MaxIters``.
    """
    X = P.X
    x, projected = _start(P, x0, params.tol)
    gamma = params.initial_step
    trace: list[float] = []
    best = np.inf
    prev = np.inf
    for k in range(params.max_iters + 1):
        Fx = eval_map(P, x)
        residual = float(np.linalg.norm(x - X.project(x - Fx)))
        trace.append(residual)
        if residual <= params.tol:
            return _finish(P, x, residual, k, trace, projected, gamma, params)
        if residual > DIVERGENCE_FACTOR * best or not np.isfinite(residual) or k == params.max_iters:
            return SolveReport(Status.MAX_ITERS, x, residual, k, trace, projected, gamma)
        if residual > prev:
            gamma *= params.backtrack_factor
            if gamma < MIN_STEP:
                return SolveReport(Status.LINE_SEARCH_FAILED, x, residual, k, trace, projected, gamma)
        best = min(best, residual)
        prev = residual
        with np.errstate(over="ignore", invalid="ignore"):
            x_new = X.project(x - gamma * Fx)
        if not np.all(np.isfinite(x_new)):
            return SolveReport(Status.MAX_ITERS, x, residual, k, trace, projected, gamma)
        x = x_new
    raise AssertionError("unreachable")


@dataclass
class Cluster:
    center: np.ndarray
    count: int
    members: list[int]


@dataclass
class GusProbeResult:
    clusters: list[Cluster]
    failed: list[tuple[int, SolveReport]]
    reports: list[SolveReport]
    radius: float

    @property
    def unique(self) -> bool:
        """Exactly one cluster and no failed runs."""
        return len(self.clusters) == 1 and not self.failed


def random_starts(P: TviProblem, num_starts: int, spread: float, seed: int) -> list[np.ndarray]:
    """Feasible starts: uniform points in the ball of radius ``spread``, projected onto X.

    Start ``i`` draws from its own stream keyed by ``(seed, i)``.
    """
    starts = []
    for i in range(num_starts):
        rng = np.random.default_rng([seed, i])
        d = rng.standard_normal(P.n)
        d /= max(np.linalg.norm(d), np.finfo(float).tiny)
        z = spread * rng.uniform() ** (1.0 / P.n) * d
        starts.append(P.X.project(z))
    return starts


def cluster_points(points: list[np.ndarray], radius: float) -> list[Cluster]:
    clusters: list[Cluster] = []
    for i, x in enumerate(points):
        for c in clusters:
            if np.linalg.norm(x - c.center) <= radius:
                c.count += 1
                c.members.append(i)
                break
        else:
            clusters.append(Cluster(x.copy(), 1, [i]))
    return clusters


def _polish(P: TviProblem, r: SolveReport, params: SolverParams) -> SolveReport:
    # A residual of tol only pins x down to about tol / (local monotonicity
    # modulus), which can exceed the cluster radius where F is flat.
    if not r.converged:
        return r
    fine = solve_extragradient(P, r.x, replace(params, tol=params.tol * POLISH_FACTOR))
    if not fine.converged:
        return r
    return SolveReport(Status.CONVERGED, fine.x, fine.residual, r.iterations + fine.iterations,
                       r.residual_trace + fine.residual_trace[1:], r.projected_start, fine.final_step)


def gus_probe(P: TviProblem, num_starts: int = 10, spread: float = 10.0,
              params: SolverParams = SolverParams()) -> GusProbeResult:
    """Solve from many random starts and group the endpoints.

    A single cluster is evidence (not proof) that the solution is unique.
    Converged endpoints are refined to ``POLISH_FACTOR * tol`` first (kept
    only if the refinement converges), then grouped within ``10 * tol``.
    Runs that do not converge are returned in ``failed``.
    """
    if num_starts <= 0 or spread <= 0:
        raise ValueError("num_starts and spread must be positive")
    reports = [_polish(P, solve_extragradient(P, x0, params), params)
               for x0 in random_starts(P, num_starts, spread, params.seed)]
    radius = 10 * params.tol
    ok = [(i, r) for i, r in enumerate(reports) if r.converged]
    clusters = cluster_points([r.x for _, r in ok], radius)
    for c in clusters:
        c.members = [ok[j][0] for j in c.members]
    failed = [(i, r) for i, r in enumerate(reports) if not r.converged]
    return GusProbeResult(clusters, failed, reports, radius)


def solve(P: TviProblem, x0=None, params: SolverParams = SolverParams(), method: str = "extragradient") -> SolveReport:
    if x0 is None:
        x0 = np.zeros(P.n)
    if method == "extragradient":
        return solve_extragradient(P, x0, params)
    if method == "fixed-point":
        return solve_fixed_point(P, x0, params)
    raise ValueError(f"unknown method {method!r}")


__all__ = [
    "Status", "SolverParams", "SolveReport", "solve_extragradient", "solve_fixed_point",
    "Cluster", "GusProbeResult", "gus_probe", "random_starts", "cluster_points", "solve",
]
