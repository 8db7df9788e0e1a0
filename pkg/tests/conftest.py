import pytest

from shpoints.darmon import build_setup
from shpoints.modsym import EllCurve, NewformSymbol

CURVES = {
    "15A1": (1, 1, 1, -10, -10, 5),
    "21A1": (1, 0, 0, -4, -1, 3),
    "33A1": (1, 1, 0, -11, 0, 11),
    "35A1": (0, 1, 1, 9, 1, 7),
    "51A1": (0, 1, 1, 1, -1, 3),
    "105A1": (1, 0, 1, -3, 1, 3),
}


def make_curve(label):
    *a, p = CURVES[label]
    return EllCurve(*a, p=p)


@pytest.fixture(scope="session")
def sym15():
    return NewformSymbol(make_curve("15A1"))


@pytest.fixture(scope="session")
def setup15():
    return build_setup(make_curve("15A1"))


@pytest.fixture(scope="session")
def setup21():
    return build_setup(make_curve("21A1"))


@pytest.fixture(scope="session")
def setup33():
    return build_setup(make_curve("33A1"))
