import numpy as np
import pytest
from scipy import integrate

from wittenlab import model
from wittenlab.errors import DomainError, NumericalError

from oracles import enumerate_model_values, gaussian_norm_quadrature


def values(spec, degree, mu, max_quanta=6):
    return [e.value for e in model.model_spectrum(spec, degree, mu, max_quanta)]


def test_spectrum_index0_degree0():
    got = values(model.MorseModelSpec(1, 0), 0, 3.0)
    assert got[:3] == [0.0, 6.0, 12.0]


def test_spectrum_index1_degree1():
    got = values(model.MorseModelSpec(1, 1), 1, 5.0)
    assert got[:3] == [0.0, 10.0, 20.0]


def test_spectrum_n2_merges_branches():
    got = values(model.MorseModelSpec(2, 1), 1, 1.0)
    oracle = enumerate_model_values(2, 1, 1, 1.0, 6)
    assert got == oracle
    # frozen prefix from the enumeration oracle: eigenvalue 4 has
    # multiplicity four (three from one sign branch, one from the other)
    assert got[:13] == [0, 2, 2, 4, 4, 4, 4, 6, 6, 6, 6, 6, 6]


@pytest.mark.parametrize("n,k", [(1, 0), (1, 1), (2, 1), (3, 2)])
def test_zero_multiplicity(n, k):
    for d in range(n + 1):
        zeros = [e for e in model.model_spectrum(model.MorseModelSpec(n, k), d, 2.0)
                 if e.value == 0.0]
        assert len(zeros) == (1 if d == k else 0)


def test_nonzero_at_least_two_mu():
    for n, k in [(1, 0), (2, 2), (3, 1)]:
        for d in range(n + 1):
            vals = values(model.MorseModelSpec(n, k), d, 1.7)
            nonzero = [v for v in vals if v > 0]
            assert min(nonzero) >= 2 * 1.7 - 1e-12


def test_dirac_spectrum_square_roots():
    spec = model.MorseModelSpec(2, 1)
    lam = values(spec, 1, 2.0, max_quanta=3)
    roots = model.model_dirac_spectrum(spec, 1, 2.0, max_quanta=3)
    squares = sorted(r * r for r in roots if r >= 0)
    assert np.allclose(sorted(lam), squares)


def test_ground_state_amplitude_and_phase():
    spec = model.MorseModelSpec(1, 0)
    val = model.model_ground_state(spec, np.pi, 0.0, [[0.0]])
    assert val[0] == pytest.approx(1.0)
    v0 = model.model_ground_state(spec, 2.0, 0.0, [[0.3]])
    v5 = model.model_ground_state(spec, 2.0, 5.0, [[0.3]])
    assert abs(v0[0]) == pytest.approx(abs(v5[0]))


def test_ground_state_norm_quadrature():
    # quadrature oracle for the continuum normalization
    for n in (1, 2):
        assert gaussian_norm_quadrature(n, 3.7) == pytest.approx(1.0, abs=1e-8)
    spec = model.MorseModelSpec(1, 1)
    val, _ = integrate.quad(
        lambda x: abs(model.model_ground_state(spec, 4.0, 3.0, [[x]])[0]) ** 2,
        -np.inf,
        np.inf,
    )
    assert val == pytest.approx(1.0, abs=1e-8)


def test_cutoff_normalization_matches_asymptote():
    a_mu, dev = model.cutoff_normalization(20.0, 3.0)
    assert abs(dev) < 1e-8
    assert a_mu == pytest.approx((np.pi / 20.0) ** 0.25, rel=1e-7)


def test_cutoff_normalization_exponential_sweep():
    devs = []
    for mu in (4.0, 6.0, 8.0, 10.0):
        _, dev = model.cutoff_normalization(mu, 1.0)
        devs.append(abs(dev) + 1e-300)
    logs = np.log(devs)
    slopes = np.diff(logs) / 2.0
    assert all(s < -0.5 for s in slopes)


def test_cutoff_trivial_gaussian():
    # rho == 1 on a huge interval: the integral is the pure Gaussian one
    rho = lambda x: np.ones_like(np.asarray(x, dtype=float))
    val, _ = integrate.quad(lambda x: np.exp(-7.0 * x * x), -np.inf, np.inf)
    assert val ** 0.5 == pytest.approx((np.pi / 7.0) ** 0.25)


def test_cutoff_validation():
    with pytest.raises(DomainError):
        model.cutoff_normalization(5.0, 1.0, rho=lambda x: np.abs(x))


@pytest.mark.parametrize("mu", [4.0, 16.0])
def test_numeric_model_check(mu):
    for k in (0, 1):
        for d in (0, 1):
            rep = model.numeric_model_check(model.MorseModelSpec(1, k), mu, d)
            assert rep.max_rel_error < 1e-4


def test_numeric_check_degree0_values():
    rep = model.numeric_model_check(model.MorseModelSpec(1, 0), 4.0, 0)
    assert np.allclose(rep.formula[:3], [0.0, 8.0, 16.0])


def test_supersymmetry_of_discretized_degrees():
    mu = 6.0
    r0 = model.numeric_model_check(model.MorseModelSpec(1, 0), mu, 0)
    r1 = model.numeric_model_check(model.MorseModelSpec(1, 0), mu, 1)
    nz0 = [v for v in r0.numeric if v > mu][:6]
    nz1 = [v for v in r1.numeric if v > mu][:6]
    assert np.allclose(nz0, nz1, rtol=1e-5)


def test_insufficient_resolution_flagged():
    with pytest.raises(NumericalError):
        model.numeric_model_check(
            model.MorseModelSpec(1, 0), 16.0, 0, grid_points=220
        )
