import json
import math

import pytest

from bdcharlier.rates import Constant, PiecewiseConstant, RateProfile, Sinusoid, profile_to_dict

HORIZON = 10.0

PROFILES = {
    "constant": RateProfile(Constant(1.0), Constant(0.5), HORIZON),
    "sin_lambda": RateProfile(Sinusoid(1.0, 0.5, 2 * math.pi), Constant(0.5), HORIZON),
    "sin_mu": RateProfile(Constant(1.0), Sinusoid(0.5, 0.5, 1.0), HORIZON),
    "piecewise": RateProfile(
        PiecewiseConstant((0.0, 0.75), (1.0, 2.0)),
        PiecewiseConstant((0.0, 1.0), (0.5, 1.0)),
        HORIZON,
    ),
}


@pytest.fixture(params=sorted(PROFILES))
def profile(request):
    return PROFILES[request.param]


@pytest.fixture
def constant_profile():
    return PROFILES["constant"]


@pytest.fixture
def write_config(tmp_path):
    def write(profile_or_obj, name="rates.json"):
        obj = profile_or_obj
        if isinstance(obj, RateProfile):
            obj = profile_to_dict(obj)
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return write
