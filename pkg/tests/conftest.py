import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="module")
def report(request):
    """Print a line to the real stdout even while pytest captures output."""
    cap = request.config.pluginmanager.getplugin("capturemanager")

    def _emit(line):
        if cap is None:
            print(line, flush=True)
            return
        with cap.global_and_fixture_disabled():
            print(line, flush=True)

    return _emit
