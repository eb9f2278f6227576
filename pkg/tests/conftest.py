import pytest

from axecg import Design, load_library, synth_ecg


@pytest.fixture(scope="session")
def lib():
    return load_library()


@pytest.fixture(scope="session")
def ecg30():
    return synth_ecg(30.0, 60.0, 0.0, seed=1)


@pytest.fixture
def accurate_design():
    return Design.accurate()
