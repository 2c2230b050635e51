import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def fig3a():
    from varroles.parser import parse_program

    return parse_program((FIXTURES / "fig3a.csimpl").read_text()).functions[0]


@pytest.fixture
def fig1b():
    from varroles.cfront import lower_c

    program, _ = lower_c((FIXTURES / "fig1b.c").read_text())
    return program.functions[0]
