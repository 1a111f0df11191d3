"""Independent oracles used to freeze expected values.

These deliberately avoid the library's own code paths: brute-force
enumeration, quadrature, finite differences, and plain matrix ranks.
"""

import numpy as np
from scipy import integrate
from scipy.special import gamma


def enumerate_model_values(n, k, degree, mu, max_quanta):
    """Dumb enumeration of mu * sum(1 + 2u_j + eps_j v_j) over all sign
    vectors with the required count of +1 entries."""
    from itertools import product

    eps = [-1 if j < k else 1 for j in range(n)]
    values = []
    for v in product((-1, 1), repeat=n):
        if sum(1 for x in v if x == 1) != degree:
            continue
        for u in product(range(max_quanta + 1), repeat=n):
            values.append(mu * sum(1 + 2 * u[j] + eps[j] * v[j] for j in range(n)))
    return sorted(values)


def mellin_zeta(lam, s, tmax=200.0):
    """(1/Gamma(s)) integral of t^{s-1} e^{-lam t} over (0, infinity)."""
    val, _ = integrate.quad(
        lambda t: t ** (s - 1.0) * np.exp(-lam * t), 0.0, tmax, limit=400
    )
    return val / gamma(s)


def heat_trace_mellin(eigenvalues, signs, s, tmax=200.0):
    """Mellin transform of the graded heat trace over a positive spectrum."""
    eig = np.asarray(eigenvalues, dtype=float)

    def f(t):
        return t ** (s - 1.0) * np.sum(signs * np.exp(-eig * t))

    val, _ = integrate.quad(f, 0.0, tmax, limit=400)
    return val / gamma(s)


def gaussian_norm_quadrature(n, mu):
    """L^2 norm of (mu/pi)^{n/4} e^{-mu |x|^2/2} by 1d quadrature per axis."""
    one, _ = integrate.quad(
        lambda x: np.sqrt(mu / np.pi) * np.exp(-mu * x * x), -np.inf, np.inf
    )
    return one ** (n / 2.0)


def brute_ranks(matrices, degrees):
    """Kernel / image dimensions of a graded differential via matrix_rank."""
    ranks = []
    for d in matrices:
        ranks.append(0 if d.size == 0 else int(np.linalg.matrix_rank(d)))
    kernels = []
    for k, nk in enumerate(degrees):
        r_in = ranks[k - 1] if k >= 1 else 0
        r_out = ranks[k] if k < len(ranks) else 0
        kernels.append(nk - r_in - r_out)
    return tuple(kernels), tuple(ranks)


def arc_weight_quadrature(system, a, b):
    """Integral of the one-form coefficient over [a, b] by adaptive
    quadrature on the trigonometric interpolant."""
    from wittenlab.circle import _eval_series, _fourier_coeffs

    coeffs = _fourier_coeffs(system._dense)

    def f(t):
        return float(np.real(_eval_series(coeffs, t))[0])

    val, _ = integrate.quad(f, a, b, limit=400)
    return val
