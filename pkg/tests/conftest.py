import pytest

from omegak.walking import Tower
from omegak.marked import MarkedTower


@pytest.fixture(scope="session")
def tower():
    return Tower()


@pytest.fixture(scope="session")
def mtower(tower):
    return MarkedTower(tower)


@pytest.fixture(scope="session")
def colim(tower):
    return tower.colimit
