"""Exact rational geometry: vectors, lattices, cones, polytopes, integration.

Every quantity here is a sympy ``Rational`` (or a plain ``int`` for primitive
lattice vectors); floating point never enters this module.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import ppl
from sympy import Matrix, Poly, QQ, Rational, symbols
from sympy.polys.domains import ZZ

logger = logging.getLogger(__name__)

Vector = tuple  # tuple[Rational, ...]
MultivariatePolynomial = Poly


class GeometryError(ValueError):
    pass


class EmptyPolytopeError(GeometryError):
    pass


class UnboundedPolytopeError(GeometryError):
    pass


class DegeneratePolytopeError(GeometryError):
    pass


class NonPrimitiveVectorError(GeometryError):
    pass


# ─────────────────────────────────────────────
# Scalars and vectors
# ─────────────────────────────────────────────

def to_rational(value) -> Rational:
    """Parse ints, "p/q" strings, Fractions and sympy numbers exactly."""
    if isinstance(value, float):
        raise GeometryError(f"refusing inexact float {value!r}; pass a 'p/q' string")
    if isinstance(value, str):
        value = value.strip()
    result = Rational(value)
    if not result.is_Rational:
        raise GeometryError(f"not a rational number: {value!r}")
    return result


def to_vector(values: Iterable) -> Vector:
    return tuple(to_rational(x) for x in values)


def dot(u: Sequence, v: Sequence) -> Rational:
    if len(u) != len(v):
        raise GeometryError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Rational(0))


def add(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(v: Sequence, s) -> Vector:
    return tuple(s * x for x in v)


def neg(v: Sequence) -> Vector:
    return tuple(-x for x in v)


def is_zero(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def primitive(v: Sequence) -> tuple[tuple[int, ...], Rational]:
    """Return ``(w, s)`` with ``w = s * v`` primitive integral and ``s > 0``."""
    v = to_vector(v)
    if is_zero(v):
        raise NonPrimitiveVectorError("the zero vector has no primitive multiple")
    denominator = math.lcm(*(int(x.q) for x in v))
    integral = [int(x * denominator) for x in v]
    content = math.gcd(*integral)
    return tuple(x // content for x in integral), Rational(denominator, content)


def affine_dimension(points: Sequence[Vector]) -> int:
    if not points:
        return -1
    base = points[0]
    differences = [sub(p, base) for p in points[1:]]
    if not differences:
        return 0
    return Matrix(differences).rank()


def _nullspace(rows: Sequence[Sequence], dim: int) -> list[Vector]:
    if not rows:
        return [tuple(Rational(int(i == j)) for j in range(dim)) for i in range(dim)]
    return [tuple(column) for column in Matrix([list(r) for r in rows]).nullspace()]


def solve_in_span(columns: Sequence[Vector], target: Vector) -> Vector | None:
    """Coordinates of ``target`` in the span of ``columns`` (independent), or None."""
    A = Matrix([list(c) for c in columns]).T
    b = Matrix(list(target))
    try:
        solution, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({p: 0 for p in params})
    return tuple(Rational(x) for x in solution)


# ─────────────────────────────────────────────
# Lattices
# ─────────────────────────────────────────────

def hermite_extend(u: Sequence[int], r: int | None = None) -> Matrix:
    """Unimodular integer matrix whose first row is the primitive vector ``u``.

    Column operations driven by the extended gcd reduce ``u`` to ``e_1``; the
    inverse of the accumulated transform then has ``u`` as its first row.
    """
    u = to_vector(u)
    r = len(u) if r is None else r
    if len(u) != r:
        raise GeometryError(f"vector of length {len(u)} given for dimension {r}")
    if any(x.q != 1 for x in u):
        raise NonPrimitiveVectorError(f"{u} is not integral")
    w = [int(x) for x in u]
    if math.gcd(*w) != 1:
        raise NonPrimitiveVectorError(f"{tuple(w)} is not primitive")

    transform = [[int(i == j) for j in range(r)] for i in range(r)]
    for j in range(1, r):
        a, b = w[0], w[j]
        if b == 0:
            continue
        x, y, g = (int(t) for t in ZZ.gcdex(ZZ(a), ZZ(b)))
        for row in transform:
            c0, cj = row[0], row[j]
            row[0] = x * c0 + y * cj
            row[j] = (-b // g) * c0 + (a // g) * cj
        w[0], w[j] = x * a + y * b, 0
    if w[0] < 0:
        for row in transform:
            row[0] = -row[0]

    return Matrix(transform).inv().applyfunc(lambda e: Rational(int(e)))


def facet_frame(normal: Sequence[int]) -> list[Vector]:
    """Rows 2..r of ``hermite_extend(normal)``: lattice coordinates on the facet."""
    H = hermite_extend(normal)
    return [tuple(H.row(i)) for i in range(1, H.rows)]


# ─────────────────────────────────────────────
# Polyhedral cones
# ─────────────────────────────────────────────

def _sign_normalized(v: tuple[int, ...]) -> tuple[int, ...]:
    for x in v:
        if x != 0:
            return v if x > 0 else tuple(-y for y in v)
    return v


@dataclass(frozen=True)
class PolyhedralCone:
    """Nonnegative span of ``generators`` plus linear span of ``lineality``."""

    dim: int
    generators: tuple[tuple[int, ...], ...] = ()
    lineality: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def from_vectors(cls, dim: int, generators: Iterable = (), lineality: Iterable = ()) -> "PolyhedralCone":
        rays = set()
        for g in generators:
            g = to_vector(g)
            if len(g) != dim:
                raise GeometryError(f"cone generator {g} not in dimension {dim}")
            if not is_zero(g):
                rays.add(primitive(g)[0])
        lines = set()
        for line in lineality:
            line = to_vector(line)
            if len(line) != dim:
                raise GeometryError(f"lineality generator {line} not in dimension {dim}")
            if not is_zero(line):
                lines.add(_sign_normalized(primitive(line)[0]))
        return cls(dim, tuple(sorted(rays)), tuple(sorted(lines)))

    @classmethod
    def whole_space(cls, dim: int) -> "PolyhedralCone":
        return cls.from_vectors(dim, lineality=[[int(i == j) for j in range(dim)] for i in range(dim)])

    def negated(self) -> "PolyhedralCone":
        return PolyhedralCone.from_vectors(self.dim, [neg(g) for g in self.generators], self.lineality)

    @cached_property
    def _facet_data(self) -> "PolyhedralCone":
        return dual_cone(self)

    @cached_property
    def lineality_space(self) -> tuple[Vector, ...]:
        dual = self._facet_data
        return tuple(_nullspace(list(dual.generators) + list(dual.lineality), self.dim))

    @property
    def is_whole_space(self) -> bool:
        return len(self.lineality_space) == self.dim

    def contains(self, x: Sequence) -> bool:
        x = to_vector(x)
        dual = self._facet_data
        return all(dot(d, x) >= 0 for d in dual.generators) and all(dot(l, x) == 0 for l in dual.lineality)

    def in_lineality_space(self, x: Sequence) -> bool:
        return self.contains(x) and self.contains(neg(to_vector(x)))

    def facet_report(self, x: Sequence) -> list[dict]:
        """Pairings of ``x`` with every facet normal and span equation."""
        x = to_vector(x)
        dual = self._facet_data
        rows = [{"kind": "facet", "normal": d, "value": dot(d, x), "ok": dot(d, x) > 0} for d in dual.generators]
        rows += [{"kind": "span", "normal": l, "value": dot(l, x), "ok": dot(l, x) == 0} for l in dual.lineality]
        return rows


def _orthogonal_to(v: Sequence, lines: Sequence[Sequence]) -> Vector:
    """Component of ``v`` orthogonal to the span of ``lines``."""
    x = Matrix(list(v))
    if not lines:
        return tuple(x)
    L = Matrix([list(l) for l in lines]).T
    return tuple(x - L * (L.T * L).inv() * (L.T * x))


def dual_cone(cone: PolyhedralCone) -> PolyhedralCone:
    """``{m : <m, x> >= 0 for all x in cone}``, by double description in ppl."""
    polyhedron = ppl.C_Polyhedron(cone.dim, "universe")
    for g in cone.generators:
        polyhedron.add_constraint(ppl.Linear_Expression(list(g), 0) >= 0)
    for l in cone.lineality:
        polyhedron.add_constraint(ppl.Linear_Expression(list(l), 0) == 0)
    rays, lines = [], []
    for generator in polyhedron.minimized_generators():
        coefficients = tuple(int(c) for c in generator.coefficients())
        if generator.is_line():
            lines.append(coefficients)
        elif generator.is_ray():
            rays.append(coefficients)
    # rays come back modulo the lines; keep the representative orthogonal to them
    return PolyhedralCone.from_vectors(cone.dim, [_orthogonal_to(r, lines) for r in rays], lines)


def relint_contains(cone: PolyhedralCone, m: Sequence) -> bool:
    """Membership in the relative interior; for the zero cone only 0 qualifies."""
    return all(row["ok"] for row in cone.facet_report(m))


# ─────────────────────────────────────────────
# Polytopes
# ─────────────────────────────────────────────

Inequality = tuple  # (normal: tuple[int, ...], bound: Rational), meaning <normal, q> <= bound


def canonical_inequality(normal: Sequence, bound) -> Inequality | None:
    """Rescale to a primitive integral normal; None for the trivial 0 <= c."""
    normal = to_vector(normal)
    bound = to_rational(bound)
    if is_zero(normal):
        if bound < 0:
            raise EmptyPolytopeError(f"inconsistent inequality 0 <= {bound}")
        return None
    integral, factor = primitive(normal)
    return integral, bound * factor


@dataclass(frozen=True)
class RationalPolytope:
    """``{q : <u_i, q> <= c_i}`` with primitive integral normals ``u_i``."""

    dim: int
    inequalities: tuple[Inequality, ...]

    @classmethod
    def from_inequalities(cls, dim: int, rows: Iterable) -> "RationalPolytope":
        bounds: dict[tuple[int, ...], Rational] = {}
        for normal, bound in rows:
            if len(normal) != dim:
                raise GeometryError(f"normal {tuple(normal)} not in dimension {dim}")
            canonical = canonical_inequality(normal, bound)
            if canonical is None:
                continue
            u, c = canonical
            bounds[u] = min(c, bounds[u]) if u in bounds else c
        return cls(dim, tuple(sorted(bounds.items())))

    @classmethod
    def from_box(cls, lower: Sequence, upper: Sequence) -> "RationalPolytope":
        dim = len(lower)
        rows = []
        for i in range(dim):
            e = [int(i == j) for j in range(dim)]
            rows.append((e, to_rational(upper[i])))
            rows.append(([-x for x in e], -to_rational(lower[i])))
        return cls.from_inequalities(dim, rows)

    def intersect(self, rows: Iterable) -> "RationalPolytope":
        return RationalPolytope.from_inequalities(self.dim, list(self.inequalities) + list(rows))

    @cached_property
    def _polyhedron(self) -> ppl.C_Polyhedron:
        polyhedron = ppl.C_Polyhedron(self.dim, "universe")
        for u, c in self.inequalities:
            # <u, q> <= p/q  becomes  p - q <u, q> >= 0 over the integers
            polyhedron.add_constraint(ppl.Linear_Expression([-int(c.q) * x for x in u], int(c.p)) >= 0)
        return polyhedron

    @cached_property
    def bounded(self) -> bool:
        return self._polyhedron.is_bounded()

    @cached_property
    def _points(self) -> tuple[Vector, ...]:
        found = set()
        for generator in self._polyhedron.minimized_generators():
            if generator.is_point():
                divisor = int(generator.divisor())
                found.add(tuple(Rational(int(x), divisor) for x in generator.coefficients()))
        return tuple(sorted(found))

    @property
    def vertices(self) -> tuple[Vector, ...]:
        if not self.bounded:
            raise UnboundedPolytopeError(f"polytope with {len(self.inequalities)} inequalities is unbounded")
        if self._polyhedron.is_empty():
            raise EmptyPolytopeError("polytope is empty")
        return self._points

    @property
    def is_empty(self) -> bool:
        if not self.bounded:
            raise UnboundedPolytopeError("emptiness is only decided for bounded regions")
        return self._polyhedron.is_empty()

    @cached_property
    def affine_dimension(self) -> int:
        return -1 if self.is_empty else int(self._polyhedron.affine_dimension())


    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dimension == self.dim

    def contains(self, point: Sequence) -> bool:
        return all(dot(u, point) <= c for u, c in self.inequalities)

    def face(self, normal: tuple[int, ...], bound) -> tuple[Vector, ...]:
        return tuple(v for v in self.vertices if dot(normal, v) == bound)

    @cached_property
    def facets(self) -> tuple[tuple[tuple[int, ...], Rational, tuple[Vector, ...]], ...]:
        """Facet-defining inequalities with their vertex sets."""
        result = []
        for u, c in self.inequalities:
            vertices = self.face(u, c)
            if len(vertices) >= self.dim and affine_dimension(vertices) == self.dim - 1:
                result.append((u, c, vertices))
        return tuple(result)

    def volume(self) -> Rational:
        return sum((s.volume for s in triangulate(self)), Rational(0))

    def dilate(self, t) -> "RationalPolytope":
        t = to_rational(t)
        if t <= 0:
            raise GeometryError(f"dilation factor must be positive, got {t}")
        return RationalPolytope(self.dim, tuple((u, c * t) for u, c in self.inequalities))

    def translate(self, shift: Sequence) -> "RationalPolytope":
        shift = to_vector(shift)
        return RationalPolytope(
            self.dim, tuple((u, c + dot(u, shift)) for u, c in self.inequalities)
        )

    def transform(self, U: Matrix) -> "RationalPolytope":
        """Pull back along ``q = U q'``."""
        rows = [(tuple(U.T * Matrix(list(u))), c) for u, c in self.inequalities]
        return RationalPolytope.from_inequalities(self.dim, rows)


def vertices(polytope: RationalPolytope) -> tuple[Vector, ...]:
    return polytope.vertices


# ─────────────────────────────────────────────
# Triangulation
# ─────────────────────────────────────────────

@dataclass(frozen=True)
class Simplex:
    vertices: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def volume(self) -> Rational:
        return simplex_measure(self.vertices)


def simplex_measure(cell: Sequence[Vector], frame: Sequence[Vector] | None = None) -> Rational:
    """Lattice-normalized volume of a simplex, optionally in facet coordinates."""
    k = len(cell) - 1
    if k == 0:
        return Rational(1)
    base = cell[0]
    edges = [sub(v, base) for v in cell[1:]]
    if frame is not None:
        edges = [tuple(dot(row, e) for row in frame) for e in edges]
    return abs(Matrix([list(e) for e in edges]).det()) / math.factorial(k)


def _pulling(polytope: RationalPolytope, face: tuple[Vector, ...], k: int, reverse: bool) -> list[tuple]:
    if k == 0:
        return [(face[0],)]
    apex = max(face) if reverse else min(face)
    cells = []
    seen = set()
    for u, c in polytope.inequalities:
        sub_face = tuple(v for v in face if dot(u, v) == c)
        if apex in sub_face or sub_face in seen or len(sub_face) < k:
            continue
        if affine_dimension(sub_face) != k - 1:
            continue
        seen.add(sub_face)
        cells.extend((apex,) + cell for cell in _pulling(polytope, sub_face, k - 1, reverse))
    return cells


def triangulate(polytope: RationalPolytope, reverse: bool = False) -> list[Simplex]:
    """Pulling triangulation from the lexicographically smallest (or largest) vertex."""
    if not polytope.is_full_dimensional:
        raise DegeneratePolytopeError(
            f"polytope has affine dimension {polytope.affine_dimension} in dimension {polytope.dim}"
        )
    return [Simplex(cell) for cell in _pulling(polytope, polytope.vertices, polytope.dim, reverse)]


def triangulate_face(polytope: RationalPolytope, face: tuple[Vector, ...], k: int) -> list[tuple]:
    return _pulling(polytope, face, k, False)


# ─────────────────────────────────────────────
# Polynomials and integration
# ─────────────────────────────────────────────

def coordinate_symbols(dim: int) -> tuple:
    return symbols(f"q0:{dim}") if dim > 1 else (symbols("q0"),)


def polynomial(expr, dim: int) -> MultivariatePolynomial:
    return Poly(expr, *coordinate_symbols(dim), domain=QQ)


def affine_polynomial(constant, linear: Sequence, dim: int) -> MultivariatePolynomial:
    q = coordinate_symbols(dim)
    return polynomial(to_rational(constant) + sum(to_rational(a) * x for a, x in zip(linear, q)), dim)


def evaluate(poly: MultivariatePolynomial, point: Sequence) -> Rational:
    return Rational(poly.eval(dict(zip(poly.gens, point)))) if poly.gens else Rational(poly.as_expr())


def integrate_simplex(poly: MultivariatePolynomial, cell: Sequence[Vector], measure: Rational) -> Rational:
    """Exact integral over a simplex of the given measure via barycentric monomials."""
    k = len(cell) - 1
    weights = symbols(f"l0:{k + 1}")
    substitution = {
        g: sum((w * vertex[i] for w, vertex in zip(weights, cell)), Rational(0)) for i, g in enumerate(poly.gens)
    }
    pulled = Poly(poly.as_expr().xreplace(substitution), *weights, domain=QQ)
    total = Rational(0)
    for monomial, coefficient in pulled.terms():
        numerator = math.prod(math.factorial(e) for e in monomial)
        total += Rational(coefficient) * numerator / math.factorial(sum(monomial) + k)
    return measure * math.factorial(k) * total


def integrate_polynomial(poly: MultivariatePolynomial, polytope: RationalPolytope, reverse: bool = False) -> Rational:
    return sum(
        (integrate_simplex(poly, s.vertices, s.volume) for s in triangulate(polytope, reverse)),
        Rational(0),
    )


def integrate_facet(
    poly: MultivariatePolynomial, polytope: RationalPolytope, normal: tuple[int, ...], face: tuple[Vector, ...]
) -> Rational:
    """Integral over one facet against the measure normalized by the facet lattice."""
    frame = facet_frame(normal)
    return sum(
        (
            integrate_simplex(poly, cell, simplex_measure(cell, frame))
            for cell in triangulate_face(polytope, face, polytope.dim - 1)
        ),
        Rational(0),
    )


def integrate_polynomial_boundary(poly: MultivariatePolynomial, polytope: RationalPolytope) -> Rational:
    if not polytope.is_full_dimensional:
        raise DegeneratePolytopeError("boundary measure needs a full-dimensional polytope")
    return sum((integrate_facet(poly, polytope, u, face) for u, _, face in polytope.facets), Rational(0))
