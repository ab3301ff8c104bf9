import numpy as np
import pytest

from tensorvi import (Box, DenseTensor, DimensionError, GameSpec, Simplex, Status, apply_power,
                      assemble, best_response_grid, cost, eval_map, player_gradient,
                      solve_extragradient, to_tvi, verify_nash, verify_solution)
from tensorvi.games import random_game, stacked_gradient, strategy_grid
from tensorvi.sets import Product

from conftest import loop_full_contraction

PENNIES = np.array([[1.0, -1.0], [-1.0, 1.0]])


def pennies():
    return GameSpec((DenseTensor(PENNIES), DenseTensor(-PENNIES)), (Simplex(2), Simplex(2)))


def bimatrix(rng, r1=2, r2=3):
    A1, A2 = rng.standard_normal((r1, r2)), rng.standard_normal((r1, r2))
    return A1, A2, GameSpec((DenseTensor(A1), DenseTensor(A2)), (Simplex(r1), Simplex(r2)))


def test_cost_bilinear(rng):
    A1, A2, G = bimatrix(rng)
    x1, x2 = rng.standard_normal(2), rng.standard_normal(3)
    x = np.concatenate([x1, x2])
    assert cost(G, 0, x) == pytest.approx(x1 @ A1 @ x2, rel=1e-14)
    assert cost(G, 1, x) == pytest.approx(x1 @ A2 @ x2, rel=1e-14)


def test_zero_payoffs():
    z = DenseTensor.zeros((2, 3, 2))
    G = GameSpec((z, z, z), (Simplex(2), Box([0, 0, 0], [1, 1, 1]), Simplex(2)))
    x = np.array([0.5, 0.5, 0.2, 0.3, 1.0, 0.0, 1.0])
    assert cost(G, 1, x) == 0.0
    np.testing.assert_array_equal(player_gradient(G, 2, x), [0.0, 0.0])
    assert not np.any(assemble(G).data)
    assert verify_nash(G, x).is_equilibrium
    np.testing.assert_array_equal(best_response_grid(G, 1, x, 5), [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(best_response_grid(G, 0, x, 5), [0.0, 1.0])


@pytest.mark.parametrize("seed", range(5))
def test_cost_matches_loops(seed):
    rng = np.random.default_rng(seed)
    G = random_game((2, 2, 2), rng)
    x = rng.standard_normal(6)
    for k in range(3):
        expected = loop_full_contraction(G.payoffs[k].data, G.blocks(x))
        assert cost(G, k, x) == pytest.approx(expected, rel=1e-13, abs=1e-14)


def test_gradient_bilinear(rng):
    A1, A2, G = bimatrix(rng)
    x = rng.standard_normal(5)
    np.testing.assert_allclose(player_gradient(G, 0, x), A1 @ x[2:], rtol=1e-14)
    np.testing.assert_allclose(player_gradient(G, 1, x), A2.T @ x[:2], rtol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_finite_differences(seed):
    rng = np.random.default_rng(seed)
    G = random_game((2, 2, 2), rng)
    x = rng.standard_normal(6)
    h = 1e-6
    for k, (o, r) in enumerate(zip(G.offsets, G.dims)):
        fd = np.empty(r)
        for j in range(r):
            e = np.zeros(6)
            e[o + j] = h
            fd[j] = (cost(G, k, x + e) - cost(G, k, x - e)) / (2 * h)
        g = player_gradient(G, k, x)
        assert np.linalg.norm(fd - g) <= 1e-6 * max(np.linalg.norm(g), 1.0)


def test_assemble_bimatrix(rng):
    A1, A2, G = bimatrix(rng)
    A = assemble(G)
    assert A.dims == (5, 5)
    x = rng.standard_normal(5)
    np.testing.assert_allclose(apply_power(A, x), np.concatenate([A1 @ x[2:], A2.T @ x[:2]]), rtol=1e-14)


@pytest.mark.parametrize("dims", [(2, 2, 2), (1, 3, 2), (2, 3), (2, 1, 2, 2)])
def test_gradient_identity(dims):
    rng = np.random.default_rng(sum(dims))
    G = random_game(dims, rng)
    P = to_tvi(G)
    for _ in range(100):
        x = rng.standard_normal(G.n)
        lhs = eval_map(P, x)
        rhs = stacked_gradient(G, x)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_assemble_zero_outside_blocks(rng):
    G = random_game((2, 3, 2), rng)
    A = assemble(G).data
    offs, dims = G.offsets, G.dims
    mask = np.zeros(A.shape, dtype=bool)
    for k in range(3):
        order = [k] + [j for j in range(3) if j != k]
        mask[tuple(slice(offs[j], offs[j] + dims[j]) for j in order)] = True
    assert not np.any(A[~mask])
    assert np.count_nonzero(A[mask]) == 3 * 12


def test_to_tvi(rng):
    G = random_game((2, 3, 1), rng)
    P = to_tvi(G)
    np.testing.assert_array_equal(P.q, np.zeros(6))
    assert P.n == 6 and P.m == 3
    assert isinstance(P.X, Product)


def test_matching_pennies_solve():
    G = pennies()
    r = solve_extragradient(to_tvi(G), [1.0, 0.0, 0.0, 1.0])
    assert r.status is Status.CONVERGED
    np.testing.assert_allclose(r.x, [0.5, 0.5, 0.5, 0.5], atol=1e-7)
    assert verify_nash(G, r.x).is_equilibrium
    # grid oracle: no player gains more than grid resolution by deviating
    for k in range(2):
        br = best_response_grid(G, k, r.x)
        dev = np.concatenate([br, r.x[2:]]) if k == 0 else np.concatenate([r.x[:2], br])
        assert cost(G, k, r.x) <= cost(G, k, dev) + 1e-7


def test_matching_pennies_pure_point_not_equilibrium():
    G = pennies()
    x = np.array([1.0, 0.0, 1.0, 0.0])
    rep = verify_nash(G, x)
    assert not rep.is_equilibrium
    # costs are minimized: player 2 already sits at -1, player 1 pays 1 and switches
    assert best_response_grid(G, 1, x)[0] == 1.0
    br = best_response_grid(G, 0, x)
    np.testing.assert_array_equal(br, [0.0, 1.0])
    assert cost(G, 0, np.concatenate([br, x[2:]])) == -1.0 < cost(G, 0, x)


def test_matching_pennies_ties_at_mixed_point():
    G = pennies()
    x = np.full(4, 0.5)
    br = best_response_grid(G, 0, x, 11)
    np.testing.assert_array_equal(br, strategy_grid(Simplex(2), 11)[0])
    assert cost(G, 0, np.concatenate([br, x[2:]])) == cost(G, 0, x) == 0.0


def test_best_response_linear_objective_hits_vertex(rng):
    for _ in range(10):
        G = random_game((3, 2), rng)
        x = np.concatenate([np.full(3, 1 / 3), [0.3, 0.7]])
        br = best_response_grid(G, 0, x, 21)
        assert sorted(br.tolist()) == [0.0, 0.0, 1.0]


def test_strategy_grid():
    g = strategy_grid(Simplex(3), 3)
    assert len(g) == 6
    np.testing.assert_allclose(g.sum(axis=1), 1.0)
    assert strategy_grid(Box([0, -1], [1, 1]), 3).shape == (9, 2)
    with pytest.raises(ValueError):
        strategy_grid(Box.orthant(2), 3)
    with pytest.raises(TypeError):
        from tensorvi import Ball
        strategy_grid(Ball([0, 0], 1.0), 3)


def planted_equilibrium(G, x):
    """Shift each payoff by a rank-one term so every player's gradient at x is constant.

    A constant gradient over a simplex block means no mixed deviation helps.
    """
    xs = G.blocks(x)
    payoffs = []
    for k in range(G.players):
        g = player_gradient(G, k, x)
        factors = [g - g.mean() if j == k else xs[j] / (xs[j] @ xs[j]) for j in range(G.players)]
        shift = factors[0]
        for f in factors[1:]:
            shift = np.multiply.outer(shift, f)
        payoffs.append(DenseTensor(G.payoffs[k].data - shift))
    return GameSpec(tuple(payoffs), G.strategy_sets)


@pytest.mark.parametrize("seed", range(10))
def test_nash_round_trip(seed):
    rng = np.random.default_rng(100 + seed)
    G = random_game((2, 2, 3), rng)
    star = np.concatenate([rng.dirichlet(np.ones(r)) for r in G.dims])
    G = planted_equilibrium(G, star)
    P = to_tvi(G)
    assert verify_nash(G, star, 1e-10).is_equilibrium
    assert verify_solution(P, star, 1e-10).is_solution
    pts = [star] + [np.concatenate([rng.dirichlet(np.ones(r)) for r in G.dims]) for _ in range(5)]
    for x in pts:
        tvi = verify_solution(P, x, 1e-8)
        nash = verify_nash(G, x, 1e-8)
        # per-player residuals are the blocks of the stacked natural residual
        assert tvi.residual == pytest.approx(np.linalg.norm(nash.per_player_residuals), rel=1e-12, abs=1e-15)
        assert tvi.is_solution == nash.is_equilibrium


def test_multilinear_superposition(rng):
    G = random_game((2, 3, 2), rng)
    x, y = rng.standard_normal(7), rng.standard_normal(7)
    a, b = 1.7, -0.4
    for k in range(3):
        for j in range(3):
            if j == k:
                continue
            o, r = G.offsets[j], G.dims[j]
            mix = x.copy()
            mix[o:o + r] = a * x[o:o + r] + b * y[o:o + r]
            yj = x.copy()
            yj[o:o + r] = y[o:o + r]
            lhs = player_gradient(G, k, mix)
            rhs = a * player_gradient(G, k, x) + b * player_gradient(G, k, yj)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_cost_is_gradient_pairing(rng):
    G = random_game((3, 2, 2), rng)
    for _ in range(20):
        x = rng.standard_normal(7)
        for k in range(3):
            g = player_gradient(G, k, x)
            assert abs(cost(G, k, x) - G.blocks(x)[k] @ g) <= 1e-12 * max(1.0, abs(cost(G, k, x)))


def test_game_validation():
    with pytest.raises(DimensionError):
        GameSpec((DenseTensor(PENNIES),), (Simplex(2),))
    with pytest.raises(DimensionError):
        GameSpec((DenseTensor(PENNIES), DenseTensor(PENNIES)), (Simplex(2), Simplex(3)))
    with pytest.raises(DimensionError):
        GameSpec((DenseTensor(PENNIES), DenseTensor(np.zeros((2, 3)))), (Simplex(2), Simplex(2)))
    with pytest.raises(IndexError):
        cost(pennies(), 2, np.zeros(4))
    with pytest.raises(DimensionError):
        cost(pennies(), 0, np.zeros(3))
