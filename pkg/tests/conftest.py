import os

import pytest
from hypothesis import HealthCheck, settings

from lsob.config import load_config
from lsob.structure import SobolevSequence

settings.register_profile("lsob", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "lsob"))

EXAMPLES = ["example1", "example2", "example3", "example4", "example5"]
CLASSICAL = ["classical0", "classical11", "classical14"]

# published reference values, 12 zeros and 12 Hessian eigenvalues of S_12 per example
PUBLISHED_ZEROS = {
    "example1": [3.0537, 5.16053, 7.53124, 10.2434, 13.3451, 16.8869, 20.9337, 25.5751, 30.9455, 37.2657, 44.9569, 55.0972],
    "example2": [4.7832, 7.23584, 9.92786, 12.9448, 16.3404, 20.1693, 24.4992, 29.4232, 35.0794, 41.6941, 49.6983, 60.1956],
    "example3": [3.35093, 5.41033, 7.75809, 10.456, 13.5478, 17.0825, 21.1239, 25.7612, 31.1283, 37.4459, 45.1347, 55.2729],
    "example4": [4.78339, 7.23607, 9.9281, 12.9451, 16.3407, 20.1695, 24.4995, 29.4235, 35.0797, 41.6944, 49.6986, 60.196],
    "example5": [-2.86242, -1.69526, 0.284629, 1.36447, 3.03668, 5.23686, 7.98826, 11.3572, 15.4574, 20.4841, 26.8154, 35.422],
}
PUBLISHED_EIGENVALUES = {
    "example1": [0.0127, 0.0304, 0.0517, 0.0778, 0.1102, 0.1509, 0.2033, 0.2722, 0.3653, 0.495, 0.6825, 0.9661],
    "example2": [0.0152, 0.0344, 0.0576, 0.0861, 0.1219, 0.1678, 0.2279, 0.3094, 0.4241, 0.5942, 0.8665, 1.3566],
    "example3": [0.0126, 0.0303, 0.0516, 0.0777, 0.1101, 0.151, 0.2038, 0.2737, 0.3689, 0.5042, 0.7066, 1.0321],
    "example4": [0.0117, 0.0278, 0.0469, 0.0699, 0.0978, 0.1322, 0.1752, 0.2301, 0.3016, 0.3973, 0.5292, 0.7179],
    "example5": [-45.8083, -27.1075, 0.0188, 0.0473, 0.0853, 0.1377, 0.213, 0.3272, 0.5154, 0.8688, 1.7428, 7.4559],
}

_SEQS = {}


def config(name):
    return load_config(name, env={}).sobolev


def sequence(name) -> SobolevSequence:
    if name not in _SEQS:
        _SEQS[name] = SobolevSequence(config(name))
    return _SEQS[name]


@pytest.fixture(scope="session")
def seqs():
    return sequence


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split('criterion ')[1].split(':')[0])):
        terminalreporter.write_line(line)
