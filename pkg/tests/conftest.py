from pathlib import Path

import numpy as np
import pytest

from nemx.devices import DeviceSet, DeviceUtility
from nemx.tariff import TariffParams

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "src" / "nemx" / "fixtures" / "synthetic_day"
FIXTURE_CONFIG = FIXTURE_DIR / "config.json"


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def one_device():
    return DeviceSet([DeviceUtility(1.0, 0.5, 3.0)])


@pytest.fixture
def two_devices():
    return DeviceSet([DeviceUtility(1.0, 0.5, 3.0), DeviceUtility(0.6, 0.2, 3.0)])


@pytest.fixture
def tariff_42():
    return TariffParams(0.4, 0.2, 0.0)


@pytest.fixture
def fixture_config():
    return FIXTURE_CONFIG
