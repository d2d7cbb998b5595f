import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffront.scaling import fit_scaling


@settings(max_examples=50)
@given(slope=st.floats(-3, 3), c=st.floats(0.1, 10.0),
       xs=st.lists(st.floats(0.5, 1e4), min_size=3, max_size=12, unique=True))
def test_exact_power_law(slope, c, xs):
    xs = sorted(xs)
    if math.log(xs[-1] / xs[0]) < 1e-3:
        return
    fit = fit_scaling([(x, c * x ** slope) for x in xs])
    assert fit.slope == pytest.approx(slope, abs=1e-6)
    assert math.exp(fit.intercept) == pytest.approx(c, rel=1e-6)
    assert fit.predict(2.0) == pytest.approx(c * 2.0 ** slope, rel=1e-6)


def test_order_independent():
    pts = [(1, 2.0), (10, 30.0), (100, 350.0), (3, 7.0)]
    assert fit_scaling(pts).slope == fit_scaling(reversed(pts)).slope


def test_noisy_slope_and_r2():
    rng = np.random.default_rng(0)
    x = np.geomspace(1, 1e3, 20)
    y = 3 * x ** 0.75 * np.exp(rng.normal(0, 0.02, x.size))
    fit = fit_scaling(zip(x, y))
    assert abs(fit.slope - 0.75) < 3 * fit.stderr + 0.01
    assert fit.r_squared > 0.99


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_scaling([(1, 1), (2, 2)])
    with pytest.raises(ValueError):
        fit_scaling([(1, 1), (2, 0), (3, 3)])
    with pytest.raises(ValueError):
        fit_scaling([(1, 1), (1, 2), (3, 3)])


def test_json_round_trip():
    import json
    fit = fit_scaling([(1, 1), (2, 4), (4, 16)])
    d = json.loads(fit.to_json())
    assert d["slope"] == pytest.approx(2.0)
    assert len(d["points"]) == 3
