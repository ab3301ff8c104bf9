"""Sampling-based falsifiers for positive definiteness on a set.

A tensor is *positive definite on X* when ``A x^m > 0`` for every nonzero
``x`` in X, and *strictly positive definite on X* when
``<A x^{m-1} - A y^{m-1}, x - y> > 0`` for all distinct ``x, y`` in X.
Deciding either property is hard in general, so the checks here only ever
falsify: a ``NotFalsified`` verdict is evidence, not proof.

A value counts as a violation when it is at most ``1e-12`` times the same
sum taken over absolute values (``|A| |x|^m`` for definiteness, and the
matching bound for the pairing). That quantity bounds the rounding error,
so exact zeros and negative values are caught while tiny but genuinely
positive values near the origin are not mistaken for violations.

Samples are examined in a fixed order: caller probes, then built-in probes,
then random batches. Batch ``b`` draws from its own stream keyed by
``(seed, b)``. The reported witness is the first violation in that order,
so the verdict does not depend on how batches are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DimensionError
from .problem import TviProblem, tensor_pairing
from .sets import FeasibleSet
from .tensor import DenseTensor, apply_power, apply_power_rows, form_value, square

STRICT_TOL = 1e-12
NORM_FLOOR = 1e-9
BATCH = 4096
# relative slack for float64 batch screening; candidates are confirmed on the scalar path
SCREEN_SLACK = 1e-8
PROBE_SCALES = (1.0, 0.1, 10.0)

# Pairs in the plane that separate the two tensor classes for classical
# quartic examples; tried whenever n == 2.
PLANAR_PROBE_PAIRS = (
    ((2.0, 3.0), (1.0, 3.0)),
    ((1.0, 1.0), (-0.5, 1.0)),
)


@dataclass(frozen=True)
class Falsified:
    witness: tuple[np.ndarray, ...]
    value: float
    samples_tested: int

    falsified = True


@dataclass(frozen=True)
class NotFalsified:
    samples_tested: int

    falsified = False


Verdict = Union[Falsified, NotFalsified]


@dataclass(frozen=True)
class ModulusEstimate:
    c_hat: float
    argmin_pair: tuple[np.ndarray, np.ndarray]
    samples_tested: int


def _margin(vals: np.ndarray) -> np.ndarray:
    # batched float64 values may differ from the scalar path in the last bits
    return SCREEN_SLACK * (1.0 + np.abs(vals))


def _basis_points(n: int) -> list[np.ndarray]:
    pts = []
    for s in PROBE_SCALES:
        for i in range(n):
            e = np.zeros(n)
            e[i] = s
            pts.extend([e, -e])
    return pts


def _point_probes(X: FeasibleSet, probes: Iterable) -> np.ndarray:
    pts = [np.asarray(p, dtype=np.float64) for p in probes] + _basis_points(X.dim)
    return X.project(np.array(pts).reshape(-1, X.dim))


def _pair_probes(X: FeasibleSet, probes: Iterable) -> tuple[np.ndarray, np.ndarray]:
    n = X.dim
    pairs = [(np.asarray(x, float), np.asarray(y, float)) for x, y in probes]
    if n == 2:
        pairs += [(np.array(x), np.array(y)) for x, y in PLANAR_PROBE_PAIRS]
    zero = np.zeros(n)
    for e in _basis_points(n):
        pairs += [(e, zero), (e, -e)]
    for i in range(n):
        for j in range(i + 1, n):
            ei, ej = np.eye(n)[i], np.eye(n)[j]
            pairs += [(ei, ej), (ei + ej, ei - ej)]
    for x, y in pairs:
        if x.shape != (n,) or y.shape != (n,):
            raise DimensionError(f"probe pair has shapes {x.shape}, {y.shape}; expected ({n},)")
    xs = X.project(np.array([p[0] for p in pairs]))
    ys = X.project(np.array([p[1] for p in pairs]))
    return xs, ys


def _random_batches(X: FeasibleSet, n_samples: int, seed: int, arity: int, usable):
    """Projected Gaussian batches, filtered by ``usable``, until ``n_samples`` rows survive.

    Draws that collapse onto the same point are discarded and replaced, so
    sets with corners or half-lines still get ``n_samples`` informative rows.
    A batch with no usable rows means the set is (numerically) too small to
    sample and ends the stream.
    """
    done = 0
    b = 0
    while done < n_samples:
        size = min(BATCH, n_samples - done)
        rng = np.random.default_rng([seed, b])
        rows = tuple(X.project(rng.standard_normal((size, X.dim))) for _ in range(arity))
        keep = usable(*rows)
        if not keep.any():
            return
        yield tuple(r[keep] for r in rows)
        done += int(keep.sum())
        b += 1


def _nonzero(pts: np.ndarray) -> np.ndarray:
    return np.linalg.norm(pts, axis=1) > NORM_FLOOR


def _distinct(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return np.linalg.norm(xs - ys, axis=1) >= NORM_FLOOR


def _pairing_rows(A, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", apply_power_rows(A, xs) - apply_power_rows(A, ys), xs - ys)


def _magnitude(A: DenseTensor) -> DenseTensor:
    return DenseTensor(np.abs(A.data))


def form_scale(absA: DenseTensor, x: np.ndarray) -> float:
    """``|A| |x|^m``: an upper bound on every term of ``A x^m``."""
    ax = np.abs(x)
    return float(np.dot(ax, apply_power(absA, ax)))


def pairing_scale(absA: DenseTensor, x: np.ndarray, y: np.ndarray) -> float:
    """Bound on the terms of ``<A x^{m-1} - A y^{m-1}, x - y>``."""
    return float(np.dot(np.abs(x - y), apply_power(absA, np.abs(x)) + apply_power(absA, np.abs(y))))


def _form_scale_rows(absA, pts):
    ap = np.abs(pts)
    return np.einsum("ij,ij->i", ap, apply_power_rows(absA, ap))


def _pairing_scale_rows(absA, xs, ys):
    s = apply_power_rows(absA, np.abs(xs)) + apply_power_rows(absA, np.abs(ys))
    return np.einsum("ij,ij->i", np.abs(xs - ys), s)


def check_pd_on(A, X: FeasibleSet, n_samples: int = 10_000, seed: int = 0,
                probes: Sequence = ()) -> Verdict:
    """Look for a nonzero ``x`` in X with ``A x^m <= 1e-12 |A| |x|^m``."""
    A = square(A)
    if X.dim != A.n:
        raise DimensionError(f"set has dimension {X.dim}, tensor has {A.n}")
    absA = _magnitude(A)
    tested = 0
    batches = [(_point_probes(X, probes),)]
    for (pts,) in chain(batches, _random_batches(X, n_samples, seed, 1, _nonzero)):
        pts = pts[_nonzero(pts)]
        vals = np.einsum("ij,ij->i", pts, apply_power_rows(A, pts))
        screen = (STRICT_TOL + SCREEN_SLACK) * _form_scale_rows(absA, pts)
        for i in np.flatnonzero(vals <= screen):
            value = form_value(A, pts[i])
            if value <= STRICT_TOL * form_scale(absA, pts[i]):
                return Falsified((pts[i].copy(),), value, tested + int(i) + 1)
        tested += pts.shape[0]
    return NotFalsified(tested)


def check_spd_on(A, X: FeasibleSet, n_samples: int = 10_000, seed: int = 0,
                 probes: Sequence = ()) -> Verdict:
    """Look for distinct ``x, y`` in X whose pairing is zero or negative up to rounding.

    The pairing is ``<A x^{m-1} - A y^{m-1}, x - y>``. Pairs closer than
    ``1e-9`` are skipped.
    """
    A = square(A)
    if X.dim != A.n:
        raise DimensionError(f"set has dimension {X.dim}, tensor has {A.n}")
    absA = _magnitude(A)
    tested = 0
    for xs, ys in chain([_pair_probes(X, probes)], _random_batches(X, n_samples, seed, 2, _distinct)):
        keep = _distinct(xs, ys)
        xs, ys = xs[keep], ys[keep]
        vals = _pairing_rows(A, xs, ys)
        screen = (STRICT_TOL + SCREEN_SLACK) * _pairing_scale_rows(absA, xs, ys)
        for i in np.flatnonzero(vals <= screen):
            value = tensor_pairing(A, xs[i], ys[i])
            if value <= STRICT_TOL * pairing_scale(absA, xs[i], ys[i]):
                return Falsified((xs[i].copy(), ys[i].copy()), value, tested + int(i) + 1)
        tested += xs.shape[0]
    return NotFalsified(tested)


def estimate_strong_modulus(P: TviProblem, n_samples: int = 10_000, seed: int = 0,
                            probes: Sequence = ()) -> ModulusEstimate:
    """Smallest observed ``<F(x) - F(y), x - y> / ||x - y||^2`` over feasible pairs.

    Any valid strong-monotonicity constant is at most ``c_hat``.
    """
    A, X = P.A, P.X
    best = (np.inf, None, None)
    tested = 0
    for xs, ys in chain([_pair_probes(X, probes)], _random_batches(X, n_samples, seed, 2, _distinct)):
        keep = _distinct(xs, ys)
        xs, ys = xs[keep], ys[keep]
        d2 = np.einsum("ij,ij->i", xs - ys, xs - ys)
        tested += xs.shape[0]
        if not xs.shape[0]:
            continue
        ratios = _pairing_rows(A, xs, ys) / d2
        lo = ratios.min()
        for i in np.flatnonzero(ratios <= lo + _margin(np.array(lo))):
            d = xs[i] - ys[i]
            r = tensor_pairing(A, xs[i], ys[i]) / float(np.dot(d, d))
            if r < best[0]:
                best = (r, xs[i].copy(), ys[i].copy())
    if best[1] is None:
        raise ValueError("no pair of distinct feasible points was sampled")
    return ModulusEstimate(best[0], (best[1], best[2]), tested)


def no_strong_monotonicity_trace(P: TviProblem, direction, steps: int) -> list[float]:
    """Ratios ``A (t d)^m / ||t d||^2`` for ``t = 2^-k``, ``k = 0 .. steps-1``.

    With ``y = 0`` these are the best moduli available at each scale. For
    ``m > 2`` they behave like ``t^(m-2)`` and fall to zero, so no strong
    monotonicity constant can hold on a set containing the origin.
    """
    if P.m <= 2:
        raise ValueError("the trace is only meaningful for order m > 2")
    if steps <= 0:
        raise ValueError("steps must be positive")
    if not P.X.contains_origin():
        raise ValueError("the set must contain the origin")
    d = np.asarray(direction, dtype=np.float64)
    if d.shape != (P.n,) or not np.any(d):
        raise DimensionError(f"direction must be a nonzero vector of length {P.n}")
    out = []
    for k in range(steps):
        x = 2.0 ** -k * d
        if not P.X.contains(x):
            raise ValueError(f"2^-{k} * direction leaves the feasible set")
        out.append(form_value(P.A, x) / float(np.dot(x, x)))
    return out
