import pytest

from medledger.chain import genesis_state
from medledger.keys import Keypair

from world_setup import build_world, make_cast, make_config


@pytest.fixture(scope="session")
def cast() -> dict[str, Keypair]:
    return make_cast()


@pytest.fixture(scope="session")
def accounts(cast) -> dict[str, str]:
    return {alias: kp.account for alias, kp in cast.items()}


@pytest.fixture
def config(cast):
    return make_config(cast)


@pytest.fixture
def state(config):
    return genesis_state(config)


@pytest.fixture
def world(state, accounts):
    build_world(state, accounts)
    return state
