import functools

import numpy as np
import pytest

from qcmce.cryptosystem import keygen
from qcmce.params import PRESETS, TOY


@functools.lru_cache(maxsize=None)
def toy_keys(variant: str, seed: int):
    return keygen(TOY, variant, seed)


@functools.lru_cache(maxsize=None)
def preset_keys(system: int, variant: str = "hardened", seed: int = 2024):
    return keygen(PRESETS[system], variant, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report one line each; collected here and repeated in the summary
ACCEPTANCE: dict[int, str] = {}


def record(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE[num] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[num])
