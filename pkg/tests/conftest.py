import numpy as np
import pytest

from chyp.hermlin import BALL, SIEGEL


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[BALL, SIEGEL], ids=["ball", "siegel"])
def form(request):
    return request.param
