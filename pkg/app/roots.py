"""Positive roots of small root systems, for building fixture documents."""
from sympy import Matrix, Rational, eye
from sympy.liealgebras.cartan_type import CartanType

SUPPORTED = ("A1", "A2", "B2", "C2", "G2")

# sympy only builds C_n for n >= 3, and its G2 roots leave the plane it is
# realized in; both are given here in a 2-dimensional ambient space.
EXPLICIT = {
    "C2": {
        "gram": [[1, 0], [0, 1]],
        "simple": [[1, -1], [0, 2]],
        "positive": [[1, -1], [0, 2], [1, 1], [2, 0]],
    },
    # coordinates in the basis of simple roots (short, long)
    "G2": {
        "gram": [[2, -3], [-3, 6]],
        "simple": [[1, 0], [0, 1]],
        "positive": [[1, 0], [0, 1], [1, 1], [2, 1], [3, 1], [3, 2]],
    },
}


def _sympy_roots(cartan: str) -> tuple[list, list, list]:
    ct = CartanType(cartan)
    roots = ct.positive_roots()
    roots = list(roots.values()) if isinstance(roots, dict) else list(roots)
    simple = [ct.simple_root(i) for i in range(1, ct.rank() + 1)]
    dim = len(roots[0])
    return eye(dim).tolist(), simple, roots


def simple_roots(cartan: str) -> list[list[Rational]]:
    if cartan not in SUPPORTED:
        raise ValueError(f"unsupported root system {cartan!r}; choose from {SUPPORTED}")
    if cartan in EXPLICIT:
        return [[Rational(x) for x in root] for root in EXPLICIT[cartan]["simple"]]
    return [[Rational(x) for x in root] for root in _sympy_roots(cartan)[1]]


def simple_root_coordinates(cartan: str, root) -> tuple[Rational, ...]:
    """Coefficients of ``root`` in the simple roots of ``cartan``."""
    S = Matrix(simple_roots(cartan)).T
    solution, _ = S.gauss_jordan_solve(Matrix([Rational(x) for x in root]))
    return tuple(Rational(x) for x in solution)


def root_system_data(cartan: str) -> dict:
    """Gram matrix and positive roots of ``cartan``.

    The result plugs straight into the ``gram``/``positive_roots`` keys of an
    input document; entries are serialized as "p/q" strings.
    """
    if cartan not in SUPPORTED:
        raise ValueError(f"unsupported root system {cartan!r}; choose from {SUPPORTED}")
    if cartan in EXPLICIT:
        gram, roots = EXPLICIT[cartan]["gram"], EXPLICIT[cartan]["positive"]
    else:
        gram, _, roots = _sympy_roots(cartan)
    return {
        "ambient_dim": len(gram),
        "gram": [[str(Rational(x)) for x in row] for row in gram],
        "positive_roots": [[str(Rational(x)) for x in root] for root in roots],
    }
