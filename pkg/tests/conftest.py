import numpy as np
import pytest
from sympy import Matrix, Rational, zeros

from config import FIXTURES_DIR
from functional import PLFunction, functional_data
from roots import SUPPORTED, root_system_data, simple_roots
from spherical import load_spherical_data, normalize, parse_spherical_data


def load_model(name):
    model = normalize(load_spherical_data(FIXTURES_DIR / f"{name}.json"))
    return model, functional_data(model)


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES_DIR / f"{name}.json")


@pytest.fixture
def unit_square():
    return load_model("p1xp1_11")


@pytest.fixture
def p2():
    return load_model("p2_anticanonical")


@pytest.fixture
def segment():
    return load_model("segment_p1")


@pytest.fixture
def f1_toric():
    return load_model("f1_toric_21")


@pytest.fixture
def f1_rank_one():
    return load_model("f1_sl2_rank1_21")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def crease_half():
    return PLFunction.from_pieces([("0", ["0", "0"]), ("-1/2", ["-1", "0"])])


@pytest.fixture
def model_of():
    return load_model


def quadrant_model(bounds, cuts=(), roots=True):
    """Polygon in the positive quadrant, under SL2 x SL2 when ``roots`` is set."""
    inequalities = [
        {"normal": ["-1", "0"], "bound": "0"},
        {"normal": ["0", "-1"], "bound": "0"},
        {"normal": ["1", "0"], "bound": str(bounds[0])},
        {"normal": ["0", "1"], "bound": str(bounds[1])},
    ]
    inequalities += [{"normal": [str(x) for x in n], "bound": str(c)} for n, c in cuts]
    document = {
        "ambient_dim": 2,
        "gram": [["1/2", "0"], ["0", "1/2"]] if roots else [["1", "0"], ["0", "1"]],
        "positive_roots": [["2", "0"], ["0", "2"]] if roots else [],
        "lattice_basis": [["1", "0"], ["0", "1"]],
        "chi": ["0", "0"],
        "polytope": {"inequalities": inequalities},
        "valuation_cone": {"lineality": [["1", "0"], ["0", "1"]]},
    }
    model = normalize(parse_spherical_data(document))
    return model, functional_data(model)


@pytest.fixture
def quadrant():
    return quadrant_model


# lattice basis inside the span of the roots, one row per column vector
ROOT_LATTICES = {
    "A1": [[1, -1]],
    "A2": [[1, -1, 0], [0, 1, -1]],
    "B2": [[1, 0], [0, 1]],
    "C2": [[1, 0], [0, 1]],
    "G2": [[1, 0], [0, 1]],
}


def random_spherical_model(rng, max_rank=3):
    """Horospherical model over a random small root system times a torus.

    The moment polytope is the dominant chamber cut by a box and one random
    half-space, so it has the origin as a vertex.
    """
    cartan = str(rng.choice(SUPPORTED))
    block = ROOT_LATTICES[cartan]
    torus = int(rng.integers(0, max_rank - len(block) + 1))
    system = root_system_data(cartan)
    d0 = system["ambient_dim"]
    d = d0 + torus
    gram = zeros(d, d)
    gram[:d0, :d0] = Matrix([[Rational(x) for x in row] for row in system["gram"]])
    for i in range(d0, d):
        gram[i, i] = 1
    pad = [0] * torus
    columns = [list(c) + pad for c in block] + [[int(i == j) for j in range(d)] for i in range(d0, d)]
    B = Matrix(columns).T

    inequalities = []
    for alpha in simple_roots(cartan):
        normal = -(gram * Matrix(list(alpha) + pad))
        inequalities.append((list(normal), 0))
    for i in range(d):
        bound = int(rng.integers(1, 4))
        inequalities.append(([int(i == j) for j in range(d)], bound))
        inequalities.append(([-int(i == j) for j in range(d)], bound))
    while True:
        normal = [int(x) for x in rng.integers(-2, 3, size=d)]
        if any(B.T * Matrix(normal)):
            break
    inequalities.append((normal, Rational(int(rng.integers(1, 7)), 2)))

    r = len(columns)
    document = {
        "ambient_dim": d,
        "gram": [[str(x) for x in gram.row(i)] for i in range(d)],
        "positive_roots": [root + ["0"] * torus for root in system["positive_roots"]],
        "lattice_basis": [[str(x) for x in c] for c in columns],
        "chi": ["0"] * d,
        "polytope": {"inequalities": [{"normal": [str(x) for x in n], "bound": str(c)} for n, c in inequalities]},
        "valuation_cone": {"lineality": [[str(int(i == j)) for j in range(r)] for i in range(r)]},
        "name": f"{cartan}xT{torus}",
    }
    model = normalize(parse_spherical_data(document))
    return model, functional_data(model)


@pytest.fixture
def random_model():
    return random_spherical_model
