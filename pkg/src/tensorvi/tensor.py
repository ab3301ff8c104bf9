"""Dense real tensors and the multilinear contractions built on them.

Indices are 0-based throughout. Storage is a dense row-major numpy array;
contractions accumulate in ``numpy.longdouble`` and contract the trailing
mode first, so results are deterministic for a given input.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

# accumulation type for contractions
ACC = np.longdouble

MAX_SYMMETRIZE_ORDER = 8


class DenseTensor:
    """An immutable m-order real tensor with dims ``(r_1, ..., r_m)``.

    ``DenseTensor(nested)`` takes nested sequences (or an ndarray);
    ``DenseTensor(flat, dims=...)`` takes a flat row-major entry list.
    """

    __slots__ = ("_data",)

    def __init__(self, entries, dims: Sequence[int] | None = None):
        data = np.array(entries, dtype=np.float64)
        if dims is not None:
            dims = tuple(int(d) for d in dims)
            if any(d <= 0 for d in dims):
                raise DimensionError(f"dims must be positive, got {dims}")
            if data.size != math.prod(dims):
                raise DimensionError(
                    f"{data.size} entries cannot fill a tensor of dims {dims}"
                )
            data = data.reshape(dims)
        if data.ndim < 1:
            raise DimensionError("a tensor needs order >= 1")
        if 0 in data.shape:
            raise DimensionError(f"dims must be positive, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("tensor entries must be finite")
        data.flags.writeable = False
        self._data = data

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "DenseTensor":
        return cls(np.zeros(tuple(dims)))

    @classmethod
    def from_sparse(cls, dims: Sequence[int], items: Iterable[tuple[Sequence[int], float]]) -> "DenseTensor":
        """Expand ``(index, value)`` pairs into a dense tensor.

        Repeated indices are rejected rather than summed.
        """
        dims = tuple(int(d) for d in dims)
        data = np.zeros(dims)
        seen = set()
        for idx, val in items:
            idx = tuple(int(i) for i in idx)
            if len(idx) != len(dims):
                raise DimensionError(f"index {idx} has length {len(idx)}, expected {len(dims)}")
            if any(not 0 <= i < d for i, d in zip(idx, dims)):
                raise DimensionError(f"index {idx} out of range for dims {dims}")
            if idx in seen:
                raise ValueError(f"duplicate index {idx}")
            seen.add(idx)
            data[idx] = val
        return cls(data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def order(self) -> int:
        return self._data.ndim

    @property
    def dims(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def is_square(self) -> bool:
        return len(set(self.dims)) == 1

    @property
    def n(self) -> int:
        """Common dimension of a square tensor."""
        if not self.is_square:
            raise DimensionError(f"tensor with dims {self.dims} is not square")
        return self.dims[0]

    def entries(self) -> np.ndarray:
        """Flat row-major view of the entries (last index fastest)."""
        return self._data.ravel()

    def nonzeros(self) -> list[tuple[tuple[int, ...], float]]:
        return [(tuple(int(i) for i in idx), float(self._data[idx]))
                for idx in zip(*np.nonzero(self._data))]

    def __neg__(self) -> "DenseTensor":
        return DenseTensor(-self._data)

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        return DenseTensor(self._data + as_tensor(other).data)

    def __mul__(self, scalar: float) -> "DenseTensor":
        return DenseTensor(self._data * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self._data, other._data))

    def __hash__(self):
        return hash((self.dims, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"DenseTensor(dims={self.dims}, nnz={np.count_nonzero(self._data)})"


def as_tensor(obj) -> DenseTensor:
    return obj if isinstance(obj, DenseTensor) else DenseTensor(obj)


def square(obj) -> DenseTensor:
    """Coerce to a tensor and insist that every mode has the same size."""
    A = as_tensor(obj)
    if not A.is_square:
        raise DimensionError(f"expected a square tensor, got dims {A.dims}")
    return A


def _vector(x, n: int, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != n:
        raise DimensionError(f"{name} must be a vector of length {n}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} must be finite")
    return x


def apply_power(A, x) -> np.ndarray:
    """Return the vector ``A x^{m-1}``.

    Component ``i`` is ``sum a[i, i2, ..., im] * x[i2] * ... * x[im]``.
    """
    A = square(A)
    x = _vector(x, A.n)
    t = A.data.astype(ACC)
    xl = x.astype(ACC)
    for _ in range(A.order - 1):
        t = t @ xl
    return np.asarray(t, dtype=np.float64).reshape(A.n)


def form_value(A, x) -> float:
    """The homogeneous form ``A x^m = <x, A x^{m-1}>``."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.dot(x, apply_power(A, x)))


def apply_power_rows(A, X: np.ndarray) -> np.ndarray:
    """Row-wise ``A x^{m-1}`` for a batch ``X`` of shape ``(N, n)``.

    Float64 throughout; meant for screening many samples. Values can differ
    from :func:`apply_power` in the last bits.
    """
    A = square(A)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != A.n:
        raise DimensionError(f"batch must have shape (N, {A.n}), got {X.shape}")
    N, n = X.shape
    t = np.broadcast_to(A.data, (N,) + A.dims)
    for _ in range(A.order - 1):
        xb = X.reshape((N,) + (1,) * (t.ndim - 2) + (n,))
        t = (t * xb).sum(axis=-1)
    return t


def contract_trailing(B, *us) -> np.ndarray:
    """Contract modes 2..m of ``B`` against ``us[0], ..., us[m-2]``.

    Returns a vector of length ``r_1``.
    """
    B = as_tensor(B)
    if len(us) != B.order - 1:
        raise DimensionError(f"order-{B.order} tensor needs {B.order - 1} vectors, got {len(us)}")
    vecs = [_vector(u, r, f"u[{k + 2}]") for k, (u, r) in enumerate(zip(us, B.dims[1:]))]
    t = B.data.astype(ACC)
    for u in reversed(vecs):
        t = t @ u.astype(ACC)
    return np.asarray(t, dtype=np.float64).reshape(B.dims[0])


def symmetrize(A) -> DenseTensor:
    """Average ``A`` over all permutations of its indices."""
    A = square(A)
    m = A.order
    if m > MAX_SYMMETRIZE_ORDER:
        raise ValueError(f"symmetrize enumerates m! permutations; order {m} exceeds {MAX_SYMMETRIZE_ORDER}")
    acc = np.zeros(A.dims, dtype=ACC)
    count = 0
    for perm in itertools.permutations(range(m)):
        acc += np.transpose(A.data, perm)
        count += 1
    return DenseTensor(np.asarray(acc / count, dtype=np.float64))


def is_symmetric(A, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    A = as_tensor(A)
    if not A.is_square:
        return False
    for perm in itertools.permutations(range(A.order)):
        if np.max(np.abs(A.data - np.transpose(A.data, perm))) > tol:
            return False
    return True
