"""Brute-force Hilbert-series cross-check of L.

For the test configuration of a rational PL function ``f`` the weight of the
isotypic piece ``V_lambda`` of ``H^0(X, L^k)`` is ``-k f((lambda - k chi)/k)``.
Summing dimensions and weights over the lattice points of ``k Delta`` and
fitting ``w_k / (k d_k) = F0 - F1/k + ...`` gives an independent numerical
estimate whose sign must match ``L(f)``.
"""
import asyncio
import logging
import math
from dataclasses import dataclass

import numpy as np
from sympy import Matrix, Rational, ceiling, floor, ilcm

from config import HILBERT_POINT_BUDGET
from criteria import CriterionError
from functional import PLFunction, check_slopes, linearity_domains
from geometry import add, scale
from spherical import NormalizedModel, weyl_dimension

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 4


class HilbertBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class HilbertFit:
    k_range: tuple[int, int]
    samples: tuple[tuple[int, float], ...]
    fit_ks: tuple[int, ...]
    F0: float
    F1: float
    residual: float
    base_change: int
    period: int


def _denominator_lcm(values) -> int:
    result = 1
    for x in values:
        result = ilcm(result, Rational(x).q)
    return int(result)


def _integral_pieces(f: PLFunction) -> tuple[int, np.ndarray, np.ndarray]:
    """Scale ``f`` by the lcm of its denominators so every piece is integral."""
    D = _denominator_lcm([c for c, _ in f.pieces] + [x for _, v in f.pieces for x in v])
    c = np.array([int(c * D) for c, _ in f.pieces], dtype=np.int64)
    V = np.array([[int(x * D) for x in v] for _, v in f.pieces], dtype=np.int64)
    return D, c, V


def quasi_period(model: NormalizedModel, f: PLFunction) -> int:
    """Smallest ``p`` for which every linearity region of ``f`` dilated by ``p`` is a lattice polytope."""
    points = list(model.polytope.vertices)
    for _, region in linearity_domains(model, f).regions:
        points.extend(region.vertices)
    return _denominator_lcm(x for p in points for x in p)


def _box(model: NormalizedModel, k: int) -> list[np.ndarray]:
    vertices = model.polytope.vertices
    ranges = []
    for i in range(model.rank):
        lo = int(floor(k * min(v[i] for v in vertices)))
        hi = int(ceiling(k * max(v[i] for v in vertices)))
        ranges.append(np.arange(lo, hi + 1, dtype=np.int64))
    return ranges


def lattice_points(model: NormalizedModel, k: int) -> np.ndarray:
    """Integral ``m`` with ``m/k`` in the moment polytope, as an ``(n, r)`` array."""
    grid = np.meshgrid(*_box(model, k), indexing="ij")
    points = np.stack([g.ravel() for g in grid], axis=1)
    keep = np.ones(len(points), dtype=bool)
    for u, c in model.polytope.inequalities:
        bound = Rational(c)
        keep &= bound.q * (points @ np.array(u, dtype=np.int64)) <= k * bound.p
    return points[keep]


def _dimensions(model: NormalizedModel, k: int, points: np.ndarray) -> list[Rational]:
    """Weyl dimension of the highest weight ``k chi + m`` for each lattice point ``m``."""
    if not model.root_forms:
        return [Rational(1)] * len(points)
    B = model.data.lattice_basis
    base = scale(model.data.chi, k)
    return [weyl_dimension(model, add(base, tuple(B * Matrix([int(x) for x in m])))) for m in points]


def ehrhart_count(model: NormalizedModel, k: int) -> Rational:
    """``d_k = dim H^0(X, L^k)``; for toric data this is the lattice-point count of ``k Delta``."""
    return sum(_dimensions(model, k, lattice_points(model, k)), Rational(0))


def _sample(model: NormalizedModel, k: int, c: np.ndarray, V: np.ndarray) -> tuple[int, Rational, Rational]:
    points = lattice_points(model, k)
    weights = -np.max(k * c[None, :] - points @ V.T, axis=1)
    if not model.root_forms:
        return k, Rational(len(points)), Rational(int(weights.sum()))
    dimensions = _dimensions(model, k, points)
    d_k = sum(dimensions, Rational(0))
    w_k = sum((d * int(w) for d, w in zip(dimensions, weights)), Rational(0))
    return k, d_k, w_k


async def _sample_all(model, ks, c, V):
    return await asyncio.gather(*(asyncio.to_thread(_sample, model, k, c, V) for k in ks))


def _fit_ks(k_max: int, period: int) -> list[int]:
    multiples = [k for k in range(period, k_max + 1, period)]
    tail = [k for k in multiples if 3 * k >= k_max]
    return tail if len(tail) >= MIN_FIT_POINTS else multiples


def hilbert_series_oracle(model: NormalizedModel, f: PLFunction, k_max: int) -> HilbertFit:
    if not (model.is_toric or model.is_horospherical):
        raise CriterionError("the Hilbert oracle only models toric and horospherical test configurations")
    check_slopes(model, f)
    D, c, V = _integral_pieces(f)
    period = quasi_period(model, f)
    fit_ks = _fit_ks(k_max, period)
    if len(fit_ks) < MIN_FIT_POINTS:
        raise HilbertBudgetError(
            f"k_max={k_max} leaves {len(fit_ks)} multiples of the quasi-period {period}; need {MIN_FIT_POINTS}"
        )

    ks = list(range(1, k_max + 1))
    total = sum(math.prod(len(axis) for axis in _box(model, k)) for k in ks)
    if total > HILBERT_POINT_BUDGET:
        raise HilbertBudgetError(f"k_max={k_max} needs {total} candidate lattice points, budget is {HILBERT_POINT_BUDGET}")

    results = asyncio.run(_sample_all(model, ks, c, V))
    samples = tuple((k, float(w_k / (k * d_k)) / D) for k, d_k, w_k in results)

    lookup = dict(samples)
    y = np.array([lookup[k] for k in fit_ks])
    inverse = 1.0 / np.array(fit_ks, dtype=float)
    A = np.stack([np.ones_like(inverse), -inverse, inverse**2, inverse**3], axis=1)
    coefficients, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.linalg.norm(A @ coefficients - y))
    logger.info(
        f"Hilbert fit on k={fit_ks[0]}..{fit_ks[-1]} (period {period}, base change {D}): "
        f"F0={coefficients[0]:.6g}, F1={coefficients[1]:.6g}, residual={residual:.2e}"
    )
    return HilbertFit(
        k_range=(1, k_max),
        samples=samples,
        fit_ks=tuple(fit_ks),
        F0=float(coefficients[0]),
        F1=float(coefficients[1]),
        residual=residual,
        base_change=D,
        period=period,
    )
