import pathlib

import pytest

import makeham as mk

DATA_DIR = pathlib.Path(__file__).parent / "data"

# parameter sets behind the four density shapes of the two-risk split
FIG_PARAMS = {
    "a": (0.0005, 0.1, 0.005),
    "b": (0.05, 0.85, 0.2),
    "c": (0.4, 0.8, 0.2),
    "d": (0.05, 0.8, 0.2),
}


@pytest.fixture(scope="session")
def fig1a():
    return mk.GompertzMakeham(*FIG_PARAMS["a"])


@pytest.fixture(scope="session")
def fig_models():
    return {key: mk.GompertzMakeham(*p) for key, p in FIG_PARAMS.items()}


@pytest.fixture(scope="session")
def model_zoo():
    """One representative valid model per family."""
    return [
        mk.GompertzMakeham(0.0005, 0.1, 0.005),
        mk.GammaGompertzMakeham(0.0005, 0.1, 0.2, 0.005),
        mk.BeardMakeham(0.0005, 0.1, 5.0, 0.005),
        mk.KannistoMakeham(0.001, 0.1, 0.01),
        mk.SilerMakeham(0.01, 1.0, 0.0005, 0.1, 0.005),
    ]


@pytest.fixture(scope="session")
def deaths_path():
    return DATA_DIR / "synthetic_deaths.txt"


@pytest.fixture(scope="session")
def exposures_path():
    return DATA_DIR / "synthetic_exposures.txt"
