import pytest

from finslercalc import FinslerStructure, build


def _structure_specs():
    euclid3 = ("euclidean-3d", 3, " + ".join(f"y{i}^2" for i in (1, 2, 3)), ())
    return {
        "worked-3d": (
            3,
            "x3*y1^3/y2 + y3^2",
            ("x3 != 0", "y2 != 0", "y1^2+y3^2 != 0"),
            None,
        ),
        "berwald-4d": (
            4,
            None,
            ("x1 != 0", "y4 != 0", "y1^2+y2^2+y3^2 != 0"),
            "sqrt(x1*y4*sqrt(y1^2+y2^2+y3^2))",
        ),
        "cuberoot-3d": (
            3,
            None,
            ("y1 != 0", "y2 != 0", "y3 != 0"),
            "(x1*y2^3+y1^2*y3)^(1/3)",
        ),
        "euclidean-3d": (3, "y1^2 + y2^2 + y3^2", (), None),
        "perturbed-flat-2d": (2, "y1^2 + y2^2 + x1*y1^3/y2", ("y2 != 0",), None),
        "perturbed-flat-3d": (
            3,
            "y1^2 + y2^2 + y3^2 + x1*y1^3/y2",
            ("y2 != 0",),
            None,
        ),
        "polar-flat-2d": (2, "y1^2 + x1^2*y2^2", ("x1 != 0",), None),
        "quartic-riemannian-2d": (2, "y1^2 + x1^4*y2^2", ("x1 != 0",), None),
    }


STRUCTURE_NAMES = list(_structure_specs())


def make_structure(name: str) -> FinslerStructure:
    dim, f2, constraints, f_text = _structure_specs()[name]
    coords = [f"x{i}" for i in range(1, dim + 1)]
    fibers = [f"y{i}" for i in range(1, dim + 1)]
    if f_text is not None:
        return FinslerStructure.from_f(dim, coords, fibers, f_text, constraints)
    return FinslerStructure(dim, coords, fibers, f2, constraints)


_GEOMETRIES: dict = {}


def geometry_for(name: str):
    if name not in _GEOMETRIES:
        _GEOMETRIES[name] = build(make_structure(name))
    return _GEOMETRIES[name]


@pytest.fixture(scope="session")
def worked3d():
    return geometry_for("worked-3d")


@pytest.fixture(scope="session")
def berwald4d():
    return geometry_for("berwald-4d")


@pytest.fixture(scope="session")
def cuberoot3d():
    return geometry_for("cuberoot-3d")


@pytest.fixture(scope="session")
def euclid3d():
    return geometry_for("euclidean-3d")


@pytest.fixture(scope="session")
def polar2d():
    return geometry_for("polar-flat-2d")
