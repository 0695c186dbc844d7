import random

import pytest

from gsspccd.enrollment import Registry, issue_credential
from gsspccd.grouppk import worked_example, setup


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def worked_keys():
    return worked_example()


@pytest.fixture(scope="session")
def worked_alice(worked_keys):
    pk, sk = worked_keys
    cred, registry = issue_credential(pk, sk, "alice", Registry(), random.Random(1),
                                      public=(112, 87, 169))
    return cred, registry


@pytest.fixture(scope="session")
def group64():
    """64-bit modulus, k = 3, 32-bit challenges."""
    return setup(3, 64, challenge_bits=32, rng=random.Random(64))


@pytest.fixture(scope="session")
def members64(group64):
    pk, sk = group64
    rng = random.Random(65)
    registry, creds = Registry(), []
    for i in range(5):
        cred, registry = issue_credential(pk, sk, f"member{i}", registry, rng)
        creds.append(cred)
    return creds, registry


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
