"""JSON documents for problems and games.

All indices in documents are 0-based. A tensor is written either as nested
arrays (dense) or as a list of ``{"idx": [...], "val": v}`` objects (sparse);
an empty list is the zero tensor. Box bounds may use the strings ``"inf"``
and ``"-inf"``. Validation errors carry a JSON-pointer location.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .errors import DocumentError, TviError
from .games import GameSpec
from .problem import TviProblem
from .sets import Ball, Box, FeasibleSet, Polyhedron, Product, Simplex, WholeSpace
from .tensor import DenseTensor

PROBLEM_VERSION = "tvi-problem/1"
GAME_VERSION = "tvi-game/1"

_INF = {"inf": math.inf, "+inf": math.inf, "infinity": math.inf, "+infinity": math.inf,
        "-inf": -math.inf, "-infinity": -math.inf}


def _load(doc) -> Any:
    if isinstance(doc, (str, bytes)):
        try:
            return json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc}") from None
    return doc


def _obj(v, ptr: str) -> dict:
    if not isinstance(v, dict):
        raise DocumentError("expected an object", ptr)
    return v


def _field(d: dict, key: str, ptr: str):
    if key not in d:
        raise DocumentError(f"missing field {key!r}", ptr)
    return d[key]


def _real(v, ptr: str, extended: bool = False) -> float:
    if isinstance(v, str) and extended and v.strip().lower() in _INF:
        return _INF[v.strip().lower()]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DocumentError(f"expected a number, got {v!r}", ptr)
    x = float(v)
    if not math.isfinite(x) and not extended:
        raise DocumentError("expected a finite number", ptr)
    return x


def _int(v, ptr: str, minimum: int = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(f"expected an integer, got {v!r}", ptr)
    if v < minimum:
        raise DocumentError(f"expected an integer >= {minimum}, got {v}", ptr)
    return v


def _vector(v, ptr: str, n: int | None = None, extended: bool = False) -> np.ndarray:
    if not isinstance(v, list):
        raise DocumentError("expected an array of numbers", ptr)
    if n is not None and len(v) != n:
        raise DocumentError(f"expected {n} entries, got {len(v)}", ptr)
    return np.array([_real(x, f"{ptr}/{i}", extended) for i, x in enumerate(v)], dtype=np.float64)


def _bound(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# -- tensors ---------------------------------------------------------------

def parse_tensor(v, dims: tuple[int, ...], ptr: str = "/tensor") -> DenseTensor:
    if not isinstance(v, list):
        raise DocumentError("tensor must be an array (dense nested arrays or sparse entries)", ptr)
    if not v or all(isinstance(e, dict) for e in v):
        return _parse_sparse(v, dims, ptr)
    return _parse_dense(v, dims, ptr)


def _parse_sparse(entries: list, dims, ptr) -> DenseTensor:
    data = np.zeros(dims)
    seen: dict[tuple, int] = {}
    for k, e in enumerate(entries):
        eptr = f"{ptr}/{k}"
        e = _obj(e, eptr)
        idx = _field(e, "idx", eptr)
        if not isinstance(idx, list) or len(idx) != len(dims):
            raise DocumentError(f"idx must list {len(dims)} indices", f"{eptr}/idx")
        idx = tuple(_int(i, f"{eptr}/idx/{j}") for j, i in enumerate(idx))
        for j, (i, r) in enumerate(zip(idx, dims)):
            if i >= r:
                raise DocumentError(f"index {i} out of range for mode of size {r}", f"{eptr}/idx/{j}")
        if idx in seen:
            raise DocumentError(f"duplicate index {list(idx)} (first at entry {seen[idx]})", f"{eptr}/idx")
        seen[idx] = k
        data[idx] = _real(_field(e, "val", eptr), f"{eptr}/val")
    return DenseTensor(data)


def _parse_dense(v, dims, ptr) -> DenseTensor:
    def walk(node, depth, p):
        if depth == len(dims):
            return _real(node, p)
        if not isinstance(node, list) or len(node) != dims[depth]:
            raise DocumentError(f"expected an array of length {dims[depth]}", p)
        return [walk(c, depth + 1, f"{p}/{i}") for i, c in enumerate(node)]

    return DenseTensor(walk(v, 0, ptr))


def tensor_to_doc(A: DenseTensor, dense: bool = False):
    if dense:
        return A.data.tolist()
    return [{"idx": list(idx), "val": val} for idx, val in A.nonzeros()]


# -- sets -------------------------------------------------------------------

def parse_set(v, dim: int | None, ptr: str = "/set") -> FeasibleSet:
    d = _obj(v, ptr)
    kind = _field(d, "type", ptr)
    try:
        X = _parse_set(kind, d, dim, ptr)
    except DocumentError:
        raise
    except (TviError, ValueError) as exc:
        raise DocumentError(str(exc), ptr) from None
    if dim is not None and X.dim != dim:
        raise DocumentError(f"set has dimension {X.dim}, expected {dim}", ptr)
    return X


def _parse_set(kind, d, dim, ptr) -> FeasibleSet:
    if kind in ("whole", "whole_space"):
        return WholeSpace(_int(d.get("dim", dim), f"{ptr}/dim", 1))
    if kind == "orthant":
        return Box.orthant(_int(d.get("dim", dim), f"{ptr}/dim", 1))
    if kind == "simplex":
        return Simplex(_int(d.get("dim", dim), f"{ptr}/dim", 1))
    if kind == "box":
        lo = _vector(_field(d, "lower", ptr), f"{ptr}/lower", dim, extended=True)
        hi = _vector(_field(d, "upper", ptr), f"{ptr}/upper", len(lo), extended=True)
        return Box(lo, hi)
    if kind == "ball":
        c = _vector(_field(d, "center", ptr), f"{ptr}/center", dim)
        return Ball(c, _real(_field(d, "radius", ptr), f"{ptr}/radius"))
    if kind == "polyhedron":
        hs = _field(d, "halfspaces", ptr)
        if not isinstance(hs, list):
            raise DocumentError("halfspaces must be an array", f"{ptr}/halfspaces")
        pairs = []
        for i, h in enumerate(hs):
            hp = f"{ptr}/halfspaces/{i}"
            h = _obj(h, hp)
            pairs.append((_vector(_field(h, "a", hp), f"{hp}/a", dim), _real(_field(h, "b", hp), f"{hp}/b")))
        return Polyhedron.from_halfspaces(pairs, dim=d.get("dim", dim))
    if kind == "product":
        fs = _field(d, "factors", ptr)
        if not isinstance(fs, list) or not fs:
            raise DocumentError("factors must be a nonempty array", f"{ptr}/factors")
        return Product(tuple(parse_set(f, None, f"{ptr}/factors/{i}") for i, f in enumerate(fs)))
    raise DocumentError(f"unknown set type {kind!r}", f"{ptr}/type")


def set_to_doc(X: FeasibleSet) -> dict:
    if isinstance(X, WholeSpace):
        return {"type": "whole", "dim": X.dim}
    if isinstance(X, Simplex):
        return {"type": "simplex", "dim": X.dim}
    if isinstance(X, Box):
        return {"type": "box", "lower": [_bound(x) for x in X.lower.tolist()],
                "upper": [_bound(x) for x in X.upper.tolist()]}
    if isinstance(X, Ball):
        return {"type": "ball", "center": X.center.tolist(), "radius": X.radius}
    if isinstance(X, Polyhedron):
        return {"type": "polyhedron", "dim": X.dim,
                "halfspaces": [{"a": a.tolist(), "b": b} for a, b in X.halfspaces()]}
    if isinstance(X, Product):
        return {"type": "product", "factors": [set_to_doc(f) for f in X.factors]}
    raise TypeError(f"cannot serialize {type(X).__name__}")


# -- problems ---------------------------------------------------------------

def _check_version(d: dict, expected: str):
    version = _field(d, "version", "")
    if version != expected:
        raise DocumentError(f"unsupported version {version!r}, expected {expected!r}", "/version")


def parse_problem(doc) -> TviProblem:
    """Parse a problem document (JSON text or an already-decoded dict)."""
    d = _obj(_load(doc), "")
    _check_version(d, PROBLEM_VERSION)
    m = _int(_field(d, "order", ""), "/order", 2)
    n = _int(_field(d, "dim", ""), "/dim", 1)
    A = parse_tensor(_field(d, "tensor", ""), (n,) * m)
    q = _vector(_field(d, "q", ""), "/q", n)
    X = parse_set(_field(d, "set", ""), n)
    return TviProblem(A, q, X)


def problem_to_doc(P: TviProblem, dense: bool = False) -> dict:
    return {
        "version": PROBLEM_VERSION,
        "order": P.m,
        "dim": P.n,
        "tensor": tensor_to_doc(P.A, dense),
        "q": P.q.tolist(),
        "set": set_to_doc(P.X),
    }


def serialize_problem(P: TviProblem, dense: bool = False) -> str:
    return json.dumps(problem_to_doc(P, dense), indent=2)


# -- games ------------------------------------------------------------------

def parse_game(doc) -> GameSpec:
    d = _obj(_load(doc), "")
    _check_version(d, GAME_VERSION)
    raw = _field(d, "dims", "")
    if not isinstance(raw, list) or len(raw) < 2:
        raise DocumentError("dims must list at least two positive integers", "/dims")
    dims = tuple(_int(r, f"/dims/{i}", 1) for i, r in enumerate(raw))
    players = _field(d, "players", "")
    if not isinstance(players, list) or len(players) != len(dims):
        raise DocumentError(f"expected {len(dims)} player entries", "/players")
    payoffs, sets = [], []
    for k, p in enumerate(players):
        pp = f"/players/{k}"
        p = _obj(p, pp)
        payoffs.append(parse_tensor(_field(p, "payoff", pp), dims, f"{pp}/payoff"))
        sets.append(parse_set(_field(p, "set", pp), dims[k], f"{pp}/set"))
    return GameSpec(tuple(payoffs), tuple(sets))


def game_to_doc(G: GameSpec, dense: bool = False) -> dict:
    return {
        "version": GAME_VERSION,
        "dims": list(G.dims),
        "players": [{"payoff": tensor_to_doc(A, dense), "set": set_to_doc(X)}
                    for A, X in zip(G.payoffs, G.strategy_sets)],
    }


def serialize_game(G: GameSpec, dense: bool = False) -> str:
    return json.dumps(game_to_doc(G, dense), indent=2)


def load_problem(path) -> TviProblem:
    with open(path) as fh:
        return parse_problem(fh.read())


def load_game(path) -> GameSpec:
    with open(path) as fh:
        return parse_game(fh.read())
