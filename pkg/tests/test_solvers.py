import numpy as np
import pytest
from scipy.optimize import brentq

from tensorvi import (Box, DenseTensor, SolverParams, Status, TviProblem, WholeSpace, gus_probe,
                      solve_extragradient, solve_fixed_point, verify_solution)
from tensorvi.solvers import cluster_points, random_starts

from conftest import lcp_enumerate


def test_extragradient_cube_root(A41):
    P = TviProblem(A41, [-1.0, -1.0], Box.orthant(2))
    r = solve_extragradient(P, [5.0, 5.0])
    assert r.status is Status.CONVERGED
    assert r.residual <= 1e-8
    np.testing.assert_allclose(r.x, np.cbrt([1.0, 1.0]), atol=1e-7)


def test_extragradient_complementary_origin(A41):
    P = TviProblem(A41, [1.0, 1.0], Box.orthant(2))
    r = solve_extragradient(P, [5.0, 5.0])
    assert r.converged
    np.testing.assert_allclose(r.x, [0.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("solver", [solve_extragradient, solve_fixed_point])
def test_singleton_box(A41, rng, solver):
    v = np.array([0.7, -2.0])
    P = TviProblem(A41, rng.standard_normal(2) * 10, Box(v, v))
    r = solver(P, [5.0, 5.0])
    assert r.converged and r.iterations <= 2
    np.testing.assert_array_equal(r.x, v)
    assert r.projected_start


def test_fixed_point_halfline(A41):
    P = TviProblem(A41, [-9.0, 0.0], Box([1, 1], [np.inf, 1]))
    r = solve_fixed_point(P, [3.0, 1.0])
    u = brentq(lambda t: t ** 3 - 9.0, 1.0, 10.0, xtol=1e-15)
    assert r.converged
    np.testing.assert_allclose(r.x, [u, 1.0], atol=1e-8)
    assert r.x[0] == pytest.approx(2.0800838, abs=1e-7)


def test_fixed_point_boundary_active(A41):
    P = TviProblem(A41, [5.0, 0.0], Box([1, 1], [np.inf, 1]))
    r = solve_fixed_point(P, [3.0, 1.0])
    assert r.converged
    np.testing.assert_array_equal(r.x, [1.0, 1.0])


def test_fixed_point_detects_divergence(A41):
    # F(x) = -x^3 pushes iterates outward; the residual explodes within a few steps
    P = TviProblem(-A41, [0.0, 0.0], WholeSpace(2))
    r = solve_fixed_point(P, [2.0, 2.0], SolverParams(max_iters=10_000))
    assert r.status is Status.MAX_ITERS
    assert r.iterations < 10
    assert r.residual_trace[-1] > 10 * min(r.residual_trace[:-1])


def test_fixed_point_step_underflow():
    # anti-monotone affine map: the step shrinks to nothing before the residual grows 10x
    P = TviProblem(DenseTensor(-np.eye(2)), [1.0, 1.0], WholeSpace(2))
    r = solve_fixed_point(P, [2.0, 2.0], SolverParams(max_iters=10_000))
    assert r.status is Status.LINE_SEARCH_FAILED
    assert not r.converged


def test_max_iters_reported(A41):
    P = TviProblem(A41, [-1.0, -1.0], Box.orthant(2))
    r = solve_extragradient(P, [5.0, 5.0], SolverParams(max_iters=3))
    assert r.status is Status.MAX_ITERS
    assert len(r.residual_trace) == 4


def test_extragradient_skew_linear():
    # monotone but not strictly: needs the step rule to stay below 1/L
    P = TviProblem(DenseTensor([[0.0, 1.0], [-1.0, 0.0]]), [0.0, 0.0], WholeSpace(2))
    r = solve_extragradient(P, [3.0, -4.0])
    assert r.converged
    assert np.linalg.norm(r.x) <= 1e-7


def test_determinism(A41):
    P = TviProblem(A41, [-0.3, 0.2], Box([0, 0], [1, 1]))
    a = solve_extragradient(P, [0.9, 0.1])
    b = solve_extragradient(P, [0.9, 0.1])
    assert a.residual_trace == b.residual_trace
    g1 = gus_probe(P, 5, 3.0, SolverParams(seed=11))
    g2 = gus_probe(P, 5, 3.0, SolverParams(seed=11))
    assert [r.residual_trace for r in g1.reports] == [r.residual_trace for r in g2.reports]


def test_converged_reports_verify(rng):
    for _ in range(10):
        A = DenseTensor(np.eye(3))
        P = TviProblem(A, rng.standard_normal(3), Box([-1, 0, -np.inf], [1, np.inf, 0.5]))
        r = solve_extragradient(P, rng.standard_normal(3))
        assert r.converged and verify_solution(P, r.x, 1e-8).is_solution


def test_gus_probe_unit_box(A41):
    P = TviProblem(A41, [-0.5, -0.5], Box([0, 0], [1, 1]))
    res = gus_probe(P, 10, 10.0)
    assert len(res.clusters) == 1 and not res.failed and res.clusters[0].count == 10
    np.testing.assert_allclose(res.clusters[0].center, np.cbrt([0.5, 0.5]), atol=1e-7)


def test_gus_probe_single_start(A41):
    P = TviProblem(A41, [-0.5, 0.1], Box([0, 0], [1, 1]))
    assert len(gus_probe(P, 1, 1.0).clusters) == 1


def test_gus_probe_skew():
    P = TviProblem(DenseTensor([[0.0, 1.0], [-1.0, 0.0]]), [0.0, 0.0], WholeSpace(2))
    res = gus_probe(P, 10, 5.0)
    assert res.unique
    assert np.linalg.norm(res.clusters[0].center) <= 1e-7


def test_gus_probe_reports_failures(A41):
    P = TviProblem(A41, [-1.0, -1.0], Box.orthant(2))
    res = gus_probe(P, 4, 5.0, SolverParams(max_iters=2))
    assert len(res.failed) + sum(c.count for c in res.clusters) == 4
    assert res.failed


def test_random_starts_feasible_and_keyed(A41):
    P = TviProblem(A41, [0, 0], Box([0, 0], [1, 1]))
    a = random_starts(P, 6, 2.0, seed=3)
    b = random_starts(P, 3, 2.0, seed=3)
    for x in a:
        assert P.X.contains(x)
    # start i does not depend on how many starts were requested
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_cluster_points():
    pts = [np.array([0.0]), np.array([5e-8]), np.array([1.0])]
    cs = cluster_points(pts, 1e-7)
    assert [c.count for c in cs] == [2, 1]


@pytest.mark.parametrize("seed", range(8))
def test_affine_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    B, C = rng.standard_normal((n, n)), rng.standard_normal((n, n))
    M = B @ B.T / n + 0.5 * np.eye(n) + (C - C.T) / 2
    q = rng.standard_normal(n)
    P = TviProblem(DenseTensor(M), q, Box.orthant(n))
    r = solve_extragradient(P, np.zeros(n))
    sols = lcp_enumerate(M, q)
    assert len(sols) == 1
    np.testing.assert_allclose(r.x, sols[0], atol=1e-6)


def test_params_validation():
    with pytest.raises(ValueError):
        SolverParams(backtrack_factor=1.0)
    with pytest.raises(ValueError):
        SolverParams(tol=0)


def test_gus_probe_flat_region_twins(A41):
    # x2 = cbrt(0.0109) where F2 has slope ~0.15: residual 1e-8 leaves x2 uncertain by ~1e-7
    P = TviProblem(A41, [-1.25465473, -0.01092835], Box([0, 0], [1, 1]))
    res = gus_probe(P, 10, 10.0)
    assert res.unique
    assert all(r.residual <= 1e-11 for r in res.reports)
    np.testing.assert_allclose(res.clusters[0].center, [1.0, np.cbrt(0.01092835)], atol=1e-9)
