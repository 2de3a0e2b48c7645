import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ggtlab.groups import model_from_descriptor, parse_word
from ggtlab.spaces import BassSerreTree, CayleyTree, bass_serre_orbit, identity_orbit


@pytest.fixture(scope="session")
def f2():
    return model_from_descriptor("F2")


@pytest.fixture(scope="session")
def z2():
    return model_from_descriptor("Z^2")


@pytest.fixture(scope="session")
def z2z():
    return model_from_descriptor("Z^2 * Z")


@pytest.fixture(scope="session")
def z2z_by_z():
    return model_from_descriptor("(Z^2 * Z) x Z")


@pytest.fixture(scope="session")
def f2xz():
    return model_from_descriptor("F2 x Z")


@pytest.fixture(scope="session")
def f2_tree(f2):
    return CayleyTree(f2)


@pytest.fixture(scope="session")
def f2_orbit(f2_tree):
    return identity_orbit(f2_tree)


@pytest.fixture(scope="session")
def bs_tree(z2z):
    return BassSerreTree(z2z)


@pytest.fixture(scope="session")
def bs_orbit(bs_tree):
    return bass_serre_orbit(bs_tree)


def w(model, text):
    return parse_word(model, text)
