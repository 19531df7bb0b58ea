import numpy as np
import pytest
from hypothesis import settings

from stacool import protocols as pr
from stacool.protocols import Family

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

FAMILIES = list(Family)
STA_WIDTHS = {Family.GAUSSIAN: 16.0, Family.SIN4: 126.0, Family.INVSQRT: 2.53, Family.VITANOV: 3.95}
STIRAP_WIDTHS = {Family.GAUSSIAN: 1600.0, Family.SIN4: 35200.0, Family.INVSQRT: 253.0, Family.VITANOV: 395.0}


@pytest.fixture(params=FAMILIES, ids=lambda f: f.value)
def family(request):
    return request.param


@pytest.fixture
def sta_protocol(family):
    return pr.ProtocolParams.create(family, T=STA_WIDTHS[family])


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))
