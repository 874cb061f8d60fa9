import os

import pytest


@pytest.fixture(scope="session", autouse=True)
def isolated_reference_cache(tmp_path_factory):
    """Point the reference cache at a session-private directory."""
    cache_dir = tmp_path_factory.mktemp("refcache")
    old = os.environ.get("FRACSTEP_CACHE_DIR")
    os.environ["FRACSTEP_CACHE_DIR"] = str(cache_dir)
    yield str(cache_dir)
    if old is None:
        os.environ.pop("FRACSTEP_CACHE_DIR", None)
    else:
        os.environ["FRACSTEP_CACHE_DIR"] = old
