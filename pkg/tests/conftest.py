import pytest

from rbchain import ledger, modmath
from rbchain.keys import PrivateKey, PublicParams

# hand-checked safe primes: 7=2*3+1, 11=2*5+1, 23=2*11+1, 47=2*23+1,
# 167=2*83+1, 179=2*89+1, 2039=2*1019+1, 2879=2*1439+1
TOY_PRIMES = [(7, 11), (23, 47), (167, 179), (2039, 2879)]

ACCEPTANCE_RESULTS = []


def seed(*labels):
    return modmath.derive_seed(modmath.seed_from_text("rbchain-tests"), *labels)


@pytest.fixture
def sk77():
    return PrivateKey(7, 11)


@pytest.fixture
def pp77():
    return PublicParams(77)


@pytest.fixture
def sk12():
    return PrivateKey(2039, 2879)


@pytest.fixture
def pp12(sk12):
    return PublicParams(sk12.n)


def build_chain(pp, length, label="chain", chain_id="test"):
    cg = ledger.init_chain(pp, chain_id)
    for i in range(length):
        ledger.append(cg, None, f"block {i}".encode(), seed(label, i))
    return cg


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
