import pytest

from maoi_edge.system_model import DeviceProfile, SystemConfig


@pytest.fixture
def profile():
    """Default-parameter device (reference media sizes, unit weights)."""
    return DeviceProfile(id=0)


@pytest.fixture
def config():
    return SystemConfig()


@pytest.fixture
def two_profiles():
    return [DeviceProfile(id=0), DeviceProfile(id=1)]
