import functools

import pytest

from finwalg.brst import BRST
from finwalg.liedata import build_gl_sl
from finwalg.trans import Translation, builtin_rep
from finwalg.walg import WAlgebra

# acceptance criteria record (number -> (passed, detail)) here; printed at the end
ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def walg(kind: str, n: int, partition: tuple, D: int) -> WAlgebra:
    return WAlgebra(build_gl_sl(kind, n, list(partition)), max_degree=D)


@functools.lru_cache(maxsize=None)
def translation(kind: str, n: int, partition: tuple, D: int, rep: str) -> Translation:
    W = walg(kind, n, partition, D)
    return Translation(W, builtin_rep(W.spec, rep))


@functools.lru_cache(maxsize=None)
def brst(kind: str, n: int, partition: tuple, D: int) -> BRST:
    return BRST(walg(kind, n, partition, D))


@pytest.fixture(scope="session")
def sl2():
    return walg("sl", 2, (2,), 16)


@pytest.fixture(scope="session")
def sl3_min():
    return walg("sl", 3, (2, 1), 12)


@pytest.fixture(scope="session")
def sl3_reg():
    return walg("sl", 3, (3,), 16)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
