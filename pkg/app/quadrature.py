"""Floating-point evaluation of L for the search layers.

A fixed quasi-random cubature of the moment polytope and its facets is built
once per model; every candidate PL function is then evaluated with a couple of
numpy reductions. Nothing here is used to certify a verdict.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc
from sympy import lambdify

from config import QUADRATURE_POINTS
from functional import FunctionalData
from geometry import facet_frame, simplex_measure, triangulate, triangulate_face
from spherical import NormalizedModel

logger = logging.getLogger(__name__)


def _as_array(values, n: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(values, dtype=float), (n,)).copy()


def _simplex_samples(cell, count: int, seed: int) -> np.ndarray:
    """Uniform quasi-random points of a simplex given by exact vertices."""
    vertices = np.array([[float(x) for x in v] for v in cell])
    k = len(cell) - 1
    if k == 0:
        return vertices
    sampler = qmc.Sobol(d=k, scramble=True, seed=seed)
    cube = sampler.random_base2(max(1, math.ceil(math.log2(count))))
    cube.sort(axis=1)
    padded = np.hstack([np.zeros((len(cube), 1)), cube, np.ones((len(cube), 1))])
    barycentric = np.diff(padded, axis=1)
    return barycentric @ vertices


@dataclass(frozen=True)
class QuadratureRule:
    interior_points: np.ndarray
    interior_weights: np.ndarray  # (a P - Q) dmu
    mass_weights: np.ndarray  # P dmu
    boundary_points: np.ndarray
    boundary_weights: np.ndarray  # P dsigma
    vertices: np.ndarray

    @staticmethod
    def values(c: np.ndarray, V: np.ndarray, X: np.ndarray) -> np.ndarray:
        return np.max(c[None, :] - X @ V.T, axis=1)

    def L(self, c: np.ndarray, V: np.ndarray) -> float:
        return float(
            self.boundary_weights @ self.values(c, V, self.boundary_points)
            - self.interior_weights @ self.values(c, V, self.interior_points)
        )

    def normalization(self, c: np.ndarray, V: np.ndarray) -> float:
        """``int (f - min f) P dmu``."""
        inner = self.values(c, V, self.interior_points)
        low = min(inner.min(), self.values(c, V, self.vertices).min())
        return float(self.mass_weights @ (inner - low))

    def positive_part_mass(self, c: np.ndarray, V: np.ndarray) -> float:
        return float(self.mass_weights @ self.values(c, V, self.interior_points))


def build_quadrature(model: NormalizedModel, fdata: FunctionalData, points: int = QUADRATURE_POINTS, seed: int = 0) -> QuadratureRule:
    r = model.rank
    gens = fdata.P.gens
    P = lambdify(gens, fdata.P.as_expr(), "numpy")
    W = lambdify(gens, (fdata.P * fdata.a - fdata.Q).as_expr(), "numpy")
    polytope = model.polytope
    volume = float(sum(s.volume for s in triangulate(polytope)))

    interior, mass, weight = [], [], []
    for index, simplex in enumerate(triangulate(polytope)):
        share = float(simplex.volume)
        X = _simplex_samples(simplex.vertices, max(16, int(points * share / volume)), seed + index)
        w = share / len(X)
        columns = [X[:, i] for i in range(r)]
        interior.append(X)
        mass.append(_as_array(P(*columns), len(X)) * w)
        weight.append(_as_array(W(*columns), len(X)) * w)

    boundary, boundary_weight = [], []
    for index, (u, _, face) in enumerate(polytope.facets):
        frame = facet_frame(u)
        for cell in triangulate_face(polytope, face, r - 1):
            share = float(simplex_measure(cell, frame))
            count = max(8, int(points * share / (volume * 2 * r)))
            X = _simplex_samples(cell, count, seed + 1000 + index)
            columns = [X[:, i] for i in range(r)]
            boundary.append(X)
            boundary_weight.append(_as_array(P(*columns), len(X)) * share / len(X))

    rule = QuadratureRule(
        interior_points=np.vstack(interior),
        interior_weights=np.concatenate(weight),
        mass_weights=np.concatenate(mass),
        boundary_points=np.vstack(boundary),
        boundary_weights=np.concatenate(boundary_weight),
        vertices=np.array([[float(x) for x in v] for v in polytope.vertices]),
    )
    logger.info(f"Quadrature: {len(rule.interior_points)} interior, {len(rule.boundary_points)} boundary nodes")
    return rule
