"""Closed convex sets with Euclidean projections.

Every set projects a single point (shape ``(n,)``) or a batch of rows
(shape ``(N, n)``). Membership is decided by projection distance, so one
tolerance means the same thing for every set type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, ProjectionError

DEFAULT_TOL = 1e-9

DYKSTRA_MAX_ITERS = 10_000
DYKSTRA_TOL = 1e-10


def _points(z, dim: int) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim not in (1, 2) or z.shape[-1] != dim:
        raise DimensionError(f"expected points of dimension {dim}, got shape {z.shape}")
    return z


class FeasibleSet:
    """Base class. Subclasses implement ``dim`` and ``_project``."""

    dim: int

    def project(self, z) -> np.ndarray:
        return self._project(_points(z, self.dim))

    def _project(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, z, tol: float = DEFAULT_TOL) -> bool:
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 1:
            raise DimensionError("contains takes a single point")
        if not np.all(np.isfinite(z)):
            return False
        return bool(np.linalg.norm(z - self.project(z)) <= tol)

    def contains_origin(self, tol: float = DEFAULT_TOL) -> bool:
        return self.contains(np.zeros(self.dim), tol)


@dataclass(frozen=True)
class WholeSpace(FeasibleSet):
    dim: int

    def __post_init__(self):
        if self.dim <= 0:
            raise DimensionError("dimension must be positive")

    def _project(self, z):
        return z.copy()


@dataclass(frozen=True, eq=False)
class Box(FeasibleSet):
    """``{x : lower <= x <= upper}`` with bounds in the extended reals.

    Halflines use ``inf`` bounds and fixed coordinates use ``lower == upper``.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.array(self.lower, dtype=np.float64).reshape(-1)
        hi = np.array(self.upper, dtype=np.float64).reshape(-1)
        if lo.shape != hi.shape or lo.size == 0:
            raise DimensionError(f"box bounds have shapes {lo.shape} and {hi.shape}")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box bounds must not be NaN")
        if np.any(lo > hi) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ProjectionError("box is empty")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def orthant(cls, dim: int) -> "Box":
        return cls(np.zeros(dim), np.full(dim, np.inf))

    @property
    def dim(self) -> int:
        return self.lower.size

    def _project(self, z):
        return np.clip(z, self.lower, self.upper)

    def __eq__(self, other):
        return (isinstance(other, Box) and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))


@dataclass(frozen=True, eq=False)
class Ball(FeasibleSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=np.float64).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise DimensionError("ball center must be a finite nonempty vector")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError("ball radius must be positive")
        c.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def unit(cls, dim: int) -> "Ball":
        return cls(np.zeros(dim), 1.0)

    @property
    def dim(self) -> int:
        return self.center.size

    def _project(self, z):
        d = z - self.center
        norm = np.linalg.norm(d, axis=-1, keepdims=True)
        scale = np.minimum(1.0, self.radius / np.maximum(norm, np.finfo(float).tiny))
        return self.center + d * scale

    def __eq__(self, other):
        return (isinstance(other, Ball) and np.array_equal(self.center, other.center)
                and self.radius == other.radius)

    def __hash__(self):
        return hash((self.center.tobytes(), self.radius))


@dataclass(frozen=True)
class Simplex(FeasibleSet):
    """The probability simplex ``{x >= 0, sum(x) = 1}``."""

    dim: int

    def __post_init__(self):
        if self.dim <= 0:
            raise DimensionError("dimension must be positive")

    def _project(self, z):
        # sort-and-threshold
        V = np.atleast_2d(z)
        U = np.sort(V, axis=1)[:, ::-1]
        cssv = np.cumsum(U, axis=1) - 1.0
        ind = np.arange(1, self.dim + 1)
        rho = np.count_nonzero(U - cssv / ind > 0, axis=1)
        theta = cssv[np.arange(V.shape[0]), rho - 1] / rho
        out = np.maximum(V - theta[:, None], 0.0)
        return out.reshape(z.shape)


@dataclass(frozen=True, eq=False)
class Polyhedron(FeasibleSet):
    """Intersection of halfspaces ``a^T x <= b``, projected with Dykstra's method.

    ``max_iters`` bounds the number of full sweeps; ``tol`` is the sweep-to-sweep
    change (and halfspace violation) at which the projection is accepted.
    """

    normals: np.ndarray
    offsets: np.ndarray
    max_iters: int = DYKSTRA_MAX_ITERS
    tol: float = DYKSTRA_TOL
    _norms2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = np.array(self.normals, dtype=np.float64)
        b = np.array(self.offsets, dtype=np.float64).reshape(-1)
        if a.ndim != 2 or a.shape[0] != b.size or a.shape[1] == 0:
            raise DimensionError(f"halfspace normals {a.shape} and offsets {b.shape} disagree")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("halfspace data must be finite")
        norms2 = np.einsum("ij,ij->i", a, a)
        zero = norms2 == 0
        if np.any(zero & (b < 0)):
            raise ProjectionError("polyhedron is empty: 0 <= b fails for a zero normal")
        a, b, norms2 = a[~zero], b[~zero], norms2[~zero]
        for arr in (a, b, norms2):
            arr.flags.writeable = False
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", b)
        object.__setattr__(self, "_norms2", norms2)
        object.__setattr__(self, "_dim", np.asarray(self.normals).shape[1])

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[tuple[Sequence[float], float]], dim: int | None = None, **kw):
        if not halfspaces:
            if dim is None:
                raise DimensionError("dim is required for a polyhedron without halfspaces")
            return cls(np.zeros((0, dim)), np.zeros(0), **kw)
        return cls(np.array([h[0] for h in halfspaces]), np.array([h[1] for h in halfspaces]), **kw)

    @property
    def dim(self) -> int:
        return self._dim

    def halfspaces(self) -> list[tuple[np.ndarray, float]]:
        return [(a.copy(), float(b)) for a, b in zip(self.normals, self.offsets)]

    def _project(self, z):
        if z.ndim == 2:
            return np.array([self._project_one(row) for row in z]).reshape(z.shape)
        return self._project_one(z)

    def _project_one(self, z):
        a, b = self.normals, self.offsets
        x = z.copy()
        if a.shape[0] == 0:
            return x
        if a.shape[0] == 1:
            return self._halfspace(x, 0)
        incr = np.zeros_like(a)
        for _ in range(self.max_iters):
            start = x.copy()
            for i in range(a.shape[0]):
                y = x + incr[i]
                x = self._halfspace(y, i)
                incr[i] = y - x
            if np.linalg.norm(x - start) <= self.tol and np.max(a @ x - b) <= self.tol * (1 + np.max(np.abs(b))):
                return x
        raise ProjectionError(
            f"Dykstra projection did not converge in {self.max_iters} sweeps "
            "(the polyhedron may be empty)"
        )

    def _halfspace(self, y, i):
        viol = self.normals[i] @ y - self.offsets[i]
        if viol <= 0:
            return y
        return y - (viol / self._norms2[i]) * self.normals[i]

    def __eq__(self, other):
        return (isinstance(other, Polyhedron) and np.array_equal(self.normals, other.normals)
                and np.array_equal(self.offsets, other.offsets))

    def __hash__(self):
        return hash((self.normals.tobytes(), self.offsets.tobytes()))


@dataclass(frozen=True)
class Product(FeasibleSet):
    """Cartesian product; coordinates are the factors' coordinates concatenated."""

    factors: tuple[FeasibleSet, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors or not all(isinstance(f, FeasibleSet) for f in factors):
            raise DimensionError("a product needs at least one FeasibleSet factor")
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    @property
    def offsets(self) -> list[int]:
        out, acc = [], 0
        for f in self.factors:
            out.append(acc)
            acc += f.dim
        return out

    def blocks(self, x) -> list[np.ndarray]:
        x = np.asarray(x)
        return [x[..., o:o + f.dim] for o, f in zip(self.offsets, self.factors)]

    def _project(self, z):
        return np.concatenate([f._project(zb) for f, zb in zip(self.factors, self.blocks(z))], axis=-1)


def project(X: FeasibleSet, z) -> np.ndarray:
    return X.project(z)


def contains(X: FeasibleSet, z, tol: float = DEFAULT_TOL) -> bool:
    return X.contains(z, tol)


def contains_origin(X: FeasibleSet) -> bool:
    return X.contains_origin()
