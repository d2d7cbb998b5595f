import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from diffront import walk_kernel as wk
from diffront.errors import BoundViolation, DomainError, ResourceCapError
from diffront.lattice import NEIGHBOR_OFFSETS, Region, symmetry_images
from diffront.constants import EULER_GAMMA


def rational_kernel(t):
    """Independent oracle: exact rational convolution on a dict."""
    P = {(0, 0): Fraction(1)}
    for _ in range(t):
        Q = {}
        for (a, b), v in P.items():
            for da, db in NEIGHBOR_OFFSETS:
                z = (a + da, b + db)
                Q[z] = Q.get(z, 0) + v / 6
        P = Q
    return P


def test_trivial_times():
    assert wk.exact_distribution(0).get((0, 0)) == 1.0
    p1 = wk.exact_distribution(1)
    assert p1.get((0, 0)) == 0.0
    assert all(p1.get(z) == 1 / 6 for z in NEIGHBOR_OFFSETS)


def test_pi2_origin_is_one_sixth():
    assert wk.exact_distribution(2).get((0, 0)) == 1 / 6
    assert rational_kernel(2)[(0, 0)] == Fraction(1, 6)


@pytest.mark.parametrize("t", [3, 5, 8, 12])
def test_matches_rational_oracle(t):
    # small times are correctly rounded, not merely close
    P = wk.exact_distribution(t)
    R = rational_kernel(t)
    for z, v in R.items():
        assert P.get(z) == float(v)
    assert sum(1 for _ in P.items()) == len(R)


def test_parity_free_support():
    p2 = wk.exact_distribution(2)
    assert all(p2.get(z) > 0 for z in NEIGHBOR_OFFSETS)


@pytest.mark.parametrize("t", [1, 7, 64, 512])
def test_mass_is_one(t):
    assert abs(wk.exact_distribution(t).total() - 1.0) <= 1e-12


@given(st.integers(-20, 20), st.integers(-20, 20))
@settings(max_examples=60, deadline=None)
def test_dihedral_symmetry(a, b):
    P = wk.exact_distribution(30)
    v = P.get((a, b))
    for z in symmetry_images((a, b)):
        assert P.get(z) == pytest.approx(v, rel=1e-12, abs=1e-300)


def test_support_in_disk_t():
    t = 20
    P = wk.exact_distribution(t)
    R = P.norms()
    assert np.all(P.values[R > t + 1e-9] == 0)
    assert np.all((P.values >= 0) & (P.values <= 1))


def test_cap_and_domain():
    with pytest.raises(ResourceCapError):
        wk.exact_distribution(10, cap=5)
    with pytest.raises(DomainError):
        wk.exact_distribution(-1)


@pytest.mark.parametrize("t", [50, 300])
def test_spectral_route_agrees_with_convolution(t):
    a = wk.exact_distribution(t)
    b = wk.spectral_distribution(t, half_width=t)
    assert np.max(np.abs(a.values - b.values)) < 1e-14


def test_kernel_switches_route_beyond_512():
    P = wk.kernel(600)
    assert abs(P.total() - 1.0) < 1e-10
    assert P.half_width < 600


def test_lclt_values():
    assert wk.lclt_density(1, 0) == pytest.approx(0.2756644, abs=5e-8)
    r = np.linspace(0, 50, 200)
    assert np.all(np.diff(wk.lclt_density(100, r)) < 0)
    with pytest.raises(DomainError):
        wk.lclt_density(0, 1.0)


def test_lclt_error_within_calibrated_constant_at_400():
    from diffront.constants import get
    err = wk.lclt_max_relative_error(wk.exact_distribution(400))
    assert err <= get("walk_kernel", "lclt_C") * 400 ** -0.75


def test_lclt_error_decreases():
    errs = [wk.lclt_max_relative_error(wk.exact_distribution(t)) for t in (100, 200, 400)]
    assert errs[0] > errs[1] > errs[2]


def test_hoeffding_envelope():
    assert wk.hoeffding_envelope(10, 0.0, C=2.5) == 2.5
    r, t = 3.0, 7.0
    assert wk.hoeffding_envelope(t, r * math.sqrt(2), C=1) == pytest.approx(
        wk.hoeffding_envelope(2 * t, r * math.sqrt(2) * math.sqrt(2), C=1) ** 1)
    assert wk.hoeffding_envelope(t, r * math.sqrt(2), C=1) == pytest.approx(math.exp(-r * r / t))
    assert wk.hoeffding_envelope(2 * t, 2 * r, C=1) == pytest.approx(math.exp(-r * r / t))


def test_hoeffding_validator_passes_and_fails_loudly():
    for t, P in enumerate(wk.iter_distributions(256)):
        if t and t % 16 == 0:
            assert wk.validate_hoeffding(wk.WalkField(t, P)) <= 1.0
    with pytest.raises(BoundViolation):
        wk.validate_hoeffding(wk.exact_distribution(20), C=0.01)


def test_cumulative_kernel_basics():
    assert wk.cumulative_kernel(0).get((0, 0)) == 1.0
    assert wk.cumulative_kernel(2).get((0, 0)) == pytest.approx(7 / 6, abs=1e-15)
    rho = wk.cumulative_kernel(300)
    assert abs(rho.total() - 301) < 1e-9
    prev = wk.cumulative_kernel(299)
    assert np.all(rho.values[1:-1, 1:-1] >= prev.values - 1e-15)
    assert rho.get((0, 0)) >= 1


def test_spectral_cumulative_agrees():
    t = 200
    a = wk.cumulative_kernel(t)
    b = wk.spectral_cumulative(t, half_width=t)
    assert np.max(np.abs(a.values - b.values)) < 1e-12


def test_e1_against_quadrature():
    quad = integrate.quad(lambda u: math.exp(-u) / u, 1, np.inf, epsabs=1e-13)[0]
    assert wk.exp_integral(1.0) == pytest.approx(quad, abs=1e-12)
    assert wk.exp_integral(1.0) == pytest.approx(0.2193839, abs=5e-8)
    assert wk.exp_integral(1.0) > wk.exp_integral(2.0)


@pytest.mark.parametrize("x", [1e-4, 1e-6])
def test_e1_small_argument_limit(x):
    quad = integrate.quad(lambda u: math.exp(-u) / u, x, 1, epsabs=1e-13, limit=200)[0] \
        + integrate.quad(lambda u: math.exp(-u) / u, 1, np.inf, epsabs=1e-13)[0]
    assert wk.exp_integral(x) == pytest.approx(quad, rel=1e-10)
    assert wk.exp_integral(x) + math.log(x) == pytest.approx(-EULER_GAMMA, abs=2 * x)


@given(st.floats(1e-8, 600))
def test_e1_matches_scipy(x):
    assert wk.exp_integral(x) == pytest.approx(special.exp1(x), rel=1e-12, abs=1e-300)


@given(st.floats(1e-6, 30))
def test_e1_inverse_round_trip(y):
    x = wk.exp_integral_inverse(y)
    assert wk.exp_integral(x) == pytest.approx(y, rel=1e-10)


def test_rho_bar_value_and_domain():
    e1 = integrate.quad(lambda u: math.exp(-u) / u, 1, np.inf, epsabs=1e-14)[0]
    assert wk.rho_bar(100, 10) == pytest.approx(math.sqrt(3) / (2 * math.pi) * e1, rel=1e-12)
    assert wk.rho_bar(100, 10) == pytest.approx(0.0604764, abs=5e-8)
    with pytest.raises(DomainError):
        wk.rho_bar(100, 0.0)


def test_cumulative_kernel_error_at_1024(rho1024):
    from diffront.constants import get
    err = wk.cumulative_max_error(rho1024)
    assert err <= get("walk_kernel", "cumulative_C") * 1024 ** (-9 / 16)


@pytest.mark.parametrize("t", [256, 1024])
def test_cumulative_kernel_lower_bound(t, rho1024):
    from diffront.constants import get
    C1 = math.sqrt(3) * math.exp(-1) / (2 * math.pi) * 0.2
    rho = rho1024 if t == 1024 else wk.cumulative_kernel(t)
    sel = rho.norms() <= t ** 0.4
    assert rho.values[sel].min() >= C1 * math.log(t) - get("walk_kernel", "cumulative_floor_C2")


def test_region_mass_and_csv(tmp_path):
    P = wk.exact_distribution(10)
    assert P.mass(Region.disk(10)) == pytest.approx(1.0, abs=1e-14)
    P.to_csv(tmp_path / "k.csv")
    lines = (tmp_path / "k.csv").read_text().splitlines()
    assert lines[0] == "a,b,value" and len(lines) - 1 == sum(1 for _ in P.items())
