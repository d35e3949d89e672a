import pytest

from comarr.config import reset_settings
from comarr.models.arrangement_loader import reset_arrangement_manager
from comarr.models.arrangements import ArrangementSpec, build


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Fresh settings and manager with the cache under tmp_path"""
    monkeypatch.setenv("COM_ARR_CACHE", str(tmp_path / "cache"))
    monkeypatch.delenv("COM_ARR_CONFIG", raising=False)
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    monkeypatch.chdir(tmp_path)
    reset_settings()
    reset_arrangement_manager()
    yield tmp_path / "cache"
    reset_settings()
    reset_arrangement_manager()


@pytest.fixture
def arrangement():
    def make(family, k, t=1):
        return build(ArrangementSpec(family=family, t=t, k=k))

    return make
