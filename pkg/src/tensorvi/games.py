"""Multilinear m-person games and their reduction to TVI(X, A, 0).

Player ``k`` picks ``x^k`` in a closed convex set ``X_k`` of dimension
``r_k`` and minimizes the cost

    f_k(x) = sum a^k[i_1, ..., i_m] x^1[i_1] ... x^m[i_m],

which is linear in the player's own block. Stacking the players' gradients
gives a homogeneous map of degree m - 1, represented by a single order-m
tensor of dimension ``n = r_1 + ... + r_m`` (see :func:`assemble`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .problem import TviProblem
from .sets import Box, FeasibleSet, Product, Simplex
from .tensor import DenseTensor, as_tensor, contract_trailing


@dataclass(frozen=True, eq=False)
class GameSpec:
    payoffs: tuple[DenseTensor, ...]
    strategy_sets: tuple[FeasibleSet, ...]

    def __post_init__(self):
        payoffs = tuple(as_tensor(t) for t in self.payoffs)
        sets = tuple(self.strategy_sets)
        m = len(payoffs)
        if m < 2:
            raise DimensionError("a game needs at least two players")
        if len(sets) != m:
            raise DimensionError(f"{m} payoff tensors but {len(sets)} strategy sets")
        dims = payoffs[0].dims
        if len(dims) != m:
            raise DimensionError(f"payoff tensors of a {m}-player game must have order {m}, got {len(dims)}")
        for k, t in enumerate(payoffs):
            if t.dims != dims:
                raise DimensionError(f"payoff {k} has dims {t.dims}, expected {dims}")
        for k, X in enumerate(sets):
            if X.dim != dims[k]:
                raise DimensionError(f"strategy set {k} has dimension {X.dim}, expected {dims[k]}")
        object.__setattr__(self, "payoffs", payoffs)
        object.__setattr__(self, "strategy_sets", sets)

    @property
    def players(self) -> int:
        return len(self.payoffs)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.payoffs[0].dims

    @property
    def n(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> list[int]:
        return [int(o) for o in np.cumsum((0,) + self.dims[:-1])]

    def blocks(self, x) -> list[np.ndarray]:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise DimensionError(f"strategy profile must have length {self.n}, got shape {x.shape}")
        return [x[o:o + r] for o, r in zip(self.offsets, self.dims)]

    def _player(self, k: int) -> int:
        if not 0 <= k < self.players:
            raise IndexError(f"player index {k} out of range for {self.players} players")
        return k


@dataclass(frozen=True)
class NashReport:
    is_equilibrium: bool
    per_player_residuals: list[float]
    tol: float


def cost(G: GameSpec, k: int, x) -> float:
    """Player ``k``'s cost: the full contraction of ``A^k`` with every block."""
    k = G._player(k)
    xs = G.blocks(x)
    return float(np.dot(xs[0], contract_trailing(G.payoffs[k], *xs[1:])))


def player_gradient(G: GameSpec, k: int, x) -> np.ndarray:
    """Gradient of player ``k``'s cost with respect to its own block.

    ``A^k`` is contracted with every block except ``x^k``; mode ``k`` stays free.
    """
    k = G._player(k)
    xs = G.blocks(x)
    moved = np.moveaxis(G.payoffs[k].data, k, 0)
    return contract_trailing(DenseTensor(moved), *(xs[:k] + xs[k + 1:]))


def stacked_gradient(G: GameSpec, x) -> np.ndarray:
    return np.concatenate([player_gradient(G, k, x) for k in range(G.players)])


def assemble(G: GameSpec) -> DenseTensor:
    """Order-m, dimension-n tensor ``A`` with ``A x^{m-1}`` equal to the stacked gradients.

    Row block ``k`` holds ``A^k`` with its own mode moved to the front; the
    remaining modes address the other players' blocks in increasing player
    order. All other entries are zero.
    """
    m, n = G.players, G.n
    offs = G.offsets
    out = np.zeros((n,) * m)
    for k in range(m):
        order = [k] + [j for j in range(m) if j != k]
        index = tuple(slice(offs[j], offs[j] + G.dims[j]) for j in order)
        out[index] = np.moveaxis(G.payoffs[k].data, k, 0)
    return DenseTensor(out)


def to_tvi(G: GameSpec) -> TviProblem:
    return TviProblem(assemble(G), np.zeros(G.n), Product(G.strategy_sets))


def verify_nash(G: GameSpec, x, tol: float = 1e-8) -> NashReport:
    """Per-player natural residuals of the best-response conditions.

    Each cost is linear in the player's own block, so a zero residual is
    equivalent to optimality against the other players' strategies.
    """
    xs = G.blocks(x)
    res = []
    for k, (X, xk) in enumerate(zip(G.strategy_sets, xs)):
        g = player_gradient(G, k, x)
        r = float(np.linalg.norm(xk - X.project(xk - g)))
        if not X.contains(xk, tol):
            r = max(r, float(np.linalg.norm(xk - X.project(xk))))
        res.append(r)
    return NashReport(max(res) <= tol, res, tol)


def strategy_grid(X: FeasibleSet, grid_points: int) -> np.ndarray:
    """Deterministic grid over a bounded Box or a Simplex, in lexicographic order."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    if isinstance(X, Box):
        if not (np.all(np.isfinite(X.lower)) and np.all(np.isfinite(X.upper))):
            raise ValueError("best-response grid needs a bounded box")
        axes = [np.linspace(lo, hi, grid_points) for lo, hi in zip(X.lower, X.upper)]
        return np.array(list(itertools.product(*axes)))
    if isinstance(X, Simplex):
        h = grid_points - 1
        pts = [c + (h - sum(c),) for c in itertools.product(range(h + 1), repeat=X.dim - 1) if sum(c) <= h]
        return np.array(pts, dtype=np.float64) / h
    raise TypeError(f"best-response grid supports Box and Simplex, not {type(X).__name__}")


def best_response_grid(G: GameSpec, k: int, x, grid_points: int = 101) -> np.ndarray:
    """Grid minimizer of player ``k``'s cost with the other blocks held fixed.

    Ties go to the first grid point in lexicographic order.
    """
    k = G._player(k)
    xs = G.blocks(x)
    grid = strategy_grid(G.strategy_sets[k], grid_points)
    best, best_val = None, np.inf
    for p in grid:
        trial = np.concatenate(xs[:k] + [p] + xs[k + 1:])
        val = cost(G, k, trial)
        if val < best_val:
            best, best_val = p, val
    return best.copy()


def random_game(dims: Sequence[int], rng: np.random.Generator, sets: Sequence[FeasibleSet] | None = None) -> GameSpec:
    """Game with standard-normal payoffs; strategy sets default to simplices."""
    dims = tuple(int(r) for r in dims)
    payoffs = [DenseTensor(rng.standard_normal(dims)) for _ in dims]
    return GameSpec(tuple(payoffs), tuple(sets) if sets is not None else tuple(Simplex(r) for r in dims))


__all__ = [
    "GameSpec", "NashReport", "cost", "player_gradient", "stacked_gradient", "assemble",
    "to_tvi", "verify_nash", "best_response_grid", "strategy_grid", "random_game",
]
