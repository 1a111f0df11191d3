import numpy as np
import pytest

import wittenlab as wl
from wittenlab import zdist
from wittenlab.errors import DomainError


@pytest.fixture(scope="module")
def gaussian():
    return zdist.GaussianTestFunction(1.0)


def test_gaussian_transform_consistency(gaussian):
    # f(0) equals the normalized transform integral
    nodes = np.linspace(-gaussian.truncation_radius, gaussian.truncation_radius, 4001)
    val = np.trapezoid(gaussian.hat(nodes), nodes) / (2 * np.pi)
    assert val == pytest.approx(gaussian.at_zero, abs=1e-10)


def test_gaussian_validation():
    with pytest.raises(DomainError):
        zdist.GaussianTestFunction(0.0)


def test_zero_test_function(exact2):
    spec = zdist.GaussianTestFunction(1.0, amplitude=0.0)
    res = zdist.pair_outer_first(exact2, 12.0, spec)
    assert abs(res.value) < 1e-14


def test_pairing_linearity(tight2):
    s1 = zdist.GaussianTestFunction(1.0)
    s2 = zdist.GaussianTestFunction(0.7, amplitude=2.0)
    both = zdist.pair_inner_first(tight2, 12.0, (s1, s2))
    a = zdist.pair_inner_first(tight2, 12.0, s1)
    b = zdist.pair_inner_first(tight2, 12.0, s2)
    # combined spec uses a wider truncation window; tails are certified
    assert abs(both.value - (a.value + b.value)) <= 1e-10 + a.tail_bound \
        + b.tail_bound + both.tail_bound


def test_orders_agree_exact(exact2, gaussian):
    inner = zdist.pair_inner_first(exact2, 20.0, gaussian)
    outer = zdist.pair_outer_first(exact2, 20.0, gaussian)
    assert abs(inner.value - outer.value) <= 1e-6 * abs(outer.value)


def test_orders_agree_tight(tight2, gaussian):
    inner = zdist.pair_inner_first(tight2, 20.0, gaussian)
    outer = zdist.pair_outer_first(tight2, 20.0, gaussian)
    assert abs(inner.value - outer.value) <= 1e-6 * abs(outer.value)


def test_realness(exact2, gaussian):
    res = zdist.pair_outer_first(exact2, 15.0, gaussian)
    assert abs(res.value.imag) < 1e-10 * (1 + abs(res.value.real))


def test_truncation_bound(tight2):
    wide = zdist.GaussianTestFunction(1.0)
    res_wide = zdist.pair_outer_first(tight2, 15.0, wide)
    # halving the radius changes the value by less than the recorded bound

    class Narrow(zdist.GaussianTestFunction):
        @property
        def truncation_radius(self):
            return 4.0 / self.sigma

    narrow = Narrow(1.0)
    res_narrow = zdist.pair_outer_first(tight2, 15.0, narrow)
    bound = narrow.tail_bound(narrow.truncation_radius) * max(
        abs(res_wide.value), 1.0
    )
    assert abs(res_wide.value - res_narrow.value) <= bound + 1e-9


def test_exact_limit_value(exact2, gaussian):
    target = sum(
        (-1.0) ** z.index * exact2.h_at(z.position) for z in exact2.zeros
    )
    res = zdist.pair_outer_first(exact2, 30.0, gaussian)
    assert abs(res.value - target * gaussian.at_zero) <= 0.02 * abs(target)


def test_monotone_approach(exact2, tight2, gaussian):
    # exact fixture: the pairing drifts to the limit like 1/mu
    target = wl.mathai_quillen_1d(exact2).value
    devs = [
        abs(zdist.pair_outer_first(exact2, mu, gaussian).value - target)
        for mu in (10.0, 20.0, 30.0)
    ]
    assert devs[2] < devs[1] < devs[0]
    # tight fixture: already converged at these strengths; the deviation
    # from the observed limit stays at the lattice-residual scale
    tight_target = (
        wl.instanton_data_circle(tight2).a1
        + wl.mathai_quillen_1d(tight2).value
    )
    for mu in (10.0, 30.0):
        dev = abs(zdist.pair_outer_first(tight2, mu, gaussian).value - tight_target)
        assert dev < 5e-3 * abs(tight_target)


def test_delta_limit_report(tight2):
    specs = [zdist.GaussianTestFunction(1.0), zdist.GaussianTestFunction(0.5)]
    target = (
        wl.instanton_data_circle(tight2).a1
        + wl.mathai_quillen_1d(tight2).value
    )
    rep = zdist.delta_limit_report(tight2, [10.0, 20.0, 30.0], specs, target)
    assert len(rep.rows) == 6
    sigmas = sorted(rep.extrapolated)
    est = [rep.extrapolated[s] for s in sigmas]
    # the two test functions extrapolate to the same limit
    assert abs(est[0] - est[1]) <= 5e-3 * abs(target)
    assert abs(est[0] - target) <= 0.02 * abs(target)
    assert len(rep.csv_rows()) == 6
