"""The tensor variational inequality TVI(X, A, q) and its solution checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .sets import FeasibleSet
from .tensor import DenseTensor, _vector, apply_power, square


@dataclass(frozen=True, eq=False)
class TviProblem:
    """Find ``x`` in ``X`` with ``<y - x, A x^{m-1} + q> >= 0`` for all ``y`` in ``X``."""

    A: DenseTensor
    q: np.ndarray
    X: FeasibleSet

    def __post_init__(self):
        A = square(self.A)
        if A.order < 2:
            raise DimensionError("the tensor must have order m >= 2")
        q = _vector(self.q, A.n, "q").copy()
        q.flags.writeable = False
        if self.X.dim != A.n:
            raise DimensionError(f"set has dimension {self.X.dim}, tensor has {A.n}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "q", q)

    @property
    def m(self) -> int:
        return self.A.order

    @property
    def n(self) -> int:
        return self.A.n

    def with_q(self, q) -> "TviProblem":
        return TviProblem(self.A, q, self.X)

    def __eq__(self, other):
        return (isinstance(other, TviProblem) and self.A == other.A
                and np.array_equal(self.q, other.q) and self.X == other.X)

    __hash__ = None


@dataclass(frozen=True)
class VerificationReport:
    is_solution: bool
    residual: float
    F_at_x: np.ndarray
    feasible: bool
    tol: float


def eval_map(P: TviProblem, x) -> np.ndarray:
    """``F(x) = A x^{m-1} + q``."""
    return apply_power(P.A, x) + P.q


def natural_residual(P: TviProblem, x) -> float:
    """``||x - proj_X(x - F(x))||``; zero exactly at solutions."""
    x = _vector(x, P.n)
    return float(np.linalg.norm(x - P.X.project(x - eval_map(P, x))))


def verify_solution(P: TviProblem, x, tol: float = 1e-8) -> VerificationReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = _vector(x, P.n)
    F = eval_map(P, x)
    residual = float(np.linalg.norm(x - P.X.project(x - F)))
    feasible = P.X.contains(x, tol)
    return VerificationReport(feasible and residual <= tol, residual, F, feasible, tol)


def pairing(P: TviProblem, x, y) -> float:
    """``<F(x) - F(y), x - y>``. The constant ``q`` cancels, so it is left out."""
    x = _vector(x, P.n, "x")
    y = _vector(y, P.n, "y")
    return tensor_pairing(P.A, x, y)


def tensor_pairing(A, x, y) -> float:
    """``<A x^{m-1} - A y^{m-1}, x - y>``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.dot(apply_power(A, x) - apply_power(A, y), x - y))


def as_affine(P: TviProblem) -> tuple[np.ndarray, np.ndarray]:
    """``(M, q)`` with ``F(x) = M x + q``; only for order-2 problems."""
    if P.m != 2:
        raise ValueError(f"as_affine needs an order-2 tensor, got order {P.m}")
    return P.A.data.copy(), P.q.copy()
