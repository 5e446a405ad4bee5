import random
from pathlib import Path

import pytest
from hypothesis import settings

from abcmassey.families import (
    NakamuraParams,
    SemidirectParams,
    bigalke_rollenske,
    complex_torus,
    nakamura,
    semidirect_family,
)
from abcmassey.hodge import MetricContext
from abcmassey.model import load_model

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"


@pytest.fixture(scope="session")
def br2():
    return load_model(bigalke_rollenske(2))


@pytest.fixture(scope="session")
def br3():
    return load_model(bigalke_rollenske(3))


@pytest.fixture(scope="session")
def torus2():
    return load_model(complex_torus(2))


@pytest.fixture(scope="session")
def nak1():
    return load_model(nakamura(NakamuraParams([1, -1], 1))[0])


@pytest.fixture(scope="session")
def nak13():
    return load_model(nakamura(NakamuraParams([1, -1], "1/3"))[0])


@pytest.fixture(scope="session")
def semi11():
    return load_model(semidirect_family(SemidirectParams(1, 1, 1, [0, 0])))


@pytest.fixture(scope="session")
def ctx_br2(br2):
    return MetricContext(br2)


@pytest.fixture(scope="session")
def ctx_nak1(nak1):
    return MetricContext(nak1)


@pytest.fixture(scope="session")
def ctx_nak13(nak13):
    return MetricContext(nak13)


@pytest.fixture(scope="session")
def ctx_semi11(semi11):
    return MetricContext(semi11)


@pytest.fixture
def rng():
    return random.Random(20261017)
