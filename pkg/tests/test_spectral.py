import numpy as np
import pytest

import wittenlab as wl
from wittenlab.errors import DomainError, NotAComplex, ShapeError
from wittenlab.spectral import (
    GradedLaplacianFamily,
    GradedMatrixComplex,
    assemble_laplacians,
    betti_numbers,
    eigendecompose,
    heat_supertrace,
    split_small_large,
    zeta_via_spectrum,
)

from oracles import heat_trace_mellin, mellin_zeta


def family_from_diag(*diags):
    return eigendecompose(
        GradedLaplacianFamily.from_matrices([np.diag(d) for d in diags])
    )


def test_one_by_one_laplacians():
    cx = GradedMatrixComplex([np.array([[2.0]])], (1, 1))
    fam = assemble_laplacians(cx)
    assert np.allclose(fam.laplacians[0], [[4.0]])
    assert np.allclose(fam.laplacians[1], [[4.0]])


def test_zero_differential_full_kernels():
    cx = GradedMatrixComplex([np.zeros((3, 2))], (2, 3))
    fam = eigendecompose(assemble_laplacians(cx))
    assert betti_numbers(fam) == (2, 3)


def test_shape_validation():
    with pytest.raises(ShapeError):
        GradedMatrixComplex([np.zeros((3, 2))], (2, 2))


def test_not_a_complex():
    d0 = np.array([[1.0], [0.0]])
    d1 = np.array([[1.0, 0.0]])
    with pytest.raises(NotAComplex):
        GradedMatrixComplex([d0, d1], (1, 2, 1))


def test_supersymmetric_pairing_on_circle(exact2_small):
    # independent eigensolve of both assembled Laplacians
    cx = wl.assemble_circle_complex(exact2_small, 8.0)
    fam = eigendecompose(assemble_laplacians(cx))
    w0, w1 = fam.eigenvalues
    tol = fam.kernel_tolerance()
    nz0 = np.sort(w0[w0 > tol])
    nz1 = np.sort(w1[w1 > tol])
    assert nz0.size == nz1.size
    assert np.max(np.abs(nz0 - nz1) / (1.0 + nz0)) < 1e-8


def test_eigendecompose_examples():
    fam = family_from_diag([3.0, 1.0])
    assert np.allclose(fam.eigenvalues[0], [1.0, 3.0])
    fam2 = eigendecompose(
        GradedLaplacianFamily.from_matrices([np.array([[2.0, 1.0], [1.0, 2.0]])])
    )
    assert np.allclose(fam2.eigenvalues[0], [1.0, 3.0])


def test_eigendecompose_random_hermitian_reconstruction():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(50, 50)) + 1j * rng.normal(size=(50, 50))
    h = a @ a.conj().T
    fam = eigendecompose(GradedLaplacianFamily.from_matrices([h]))
    w, u = fam.eigenvalues[0], fam.eigenframes[0]
    resid = np.linalg.norm(h - (u * w) @ u.conj().T, 2)
    assert resid <= 1e-12 * np.linalg.norm(h, 2)


def test_split_small_large_trivial():
    fam = family_from_diag([0.0, 0.3, 7.0])
    split = split_small_large(fam)
    assert split.small_counts == (2,)
    assert split.large_counts == (1,)
    fam2 = family_from_diag([0.1, 0.9, 1.0])
    assert split_small_large(fam2).large_counts == (0,)


def test_split_counts_match_zero_count_on_circle(tight2):
    cx = wl.assemble_circle_complex(tight2, 20.0)
    fam = eigendecompose(assemble_laplacians(cx))
    split = split_small_large(fam)
    assert split.small_counts == tight2.counts


def test_split_invariant_under_unitary_change_of_basis(tight2):
    rng = np.random.default_rng(5)
    cx = wl.assemble_circle_complex(tight2, 12.0)
    qs = []
    for n in cx.degrees:
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q, _ = np.linalg.qr(m)
        qs.append(q)
    fam1 = eigendecompose(assemble_laplacians(cx))
    fam2 = eigendecompose(assemble_laplacians(cx.unitary_conjugate(qs)))
    s1, s2 = split_small_large(fam1), split_small_large(fam2)
    assert s1.small_counts == s2.small_counts


def test_heat_supertrace_zero_complex():
    cx = GradedMatrixComplex([np.zeros((1, 2))], (2, 1))
    fam = eigendecompose(assemble_laplacians(cx))
    for t in (0.1, 1.0, 7.0):
        assert heat_supertrace(fam, None, t, "all") == pytest.approx(1.0)


@pytest.mark.parametrize("t", [0.05, 0.3, 2.0])
def test_mckean_singer_and_perp_vanishing(tight2, t):
    cx = wl.assemble_circle_complex(tight2, 10.0)
    fam = eigendecompose(assemble_laplacians(cx))
    betti = betti_numbers(fam)
    chi = sum((-1) ** k * b for k, b in enumerate(betti))
    dim = sum(fam.degrees)
    val = heat_supertrace(fam, None, t, "all")
    assert abs(val - chi) <= 1e-8 * dim
    assert abs(heat_supertrace(fam, None, t, "perp")) <= 1e-8 * dim


def test_heat_supertrace_domain():
    fam = family_from_diag([1.0])
    with pytest.raises(DomainError):
        heat_supertrace(fam, None, 0.0)


def test_zeta_via_spectrum_trivial():
    fam = family_from_diag([1.0, 4.0])
    assert zeta_via_spectrum(fam, None, 1.0) == pytest.approx(1.25)
    fam2 = family_from_diag([0.0, 2.0])
    assert zeta_via_spectrum(fam2, None, 1.0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        zeta_via_spectrum(fam, None, 1.0, lambda_cut=-1.0)


def test_zeta_matches_mellin_quadrature():
    fam = family_from_diag([2.0])
    s = 1.5
    assert abs(zeta_via_spectrum(fam, None, s) - 2.0 ** (-s)) < 1e-12
    assert abs(mellin_zeta(2.0, s) - 2.0 ** (-s)) < 1e-10


def test_zeta_integer_s_equals_heat_trace_mellin():
    # gapped two-degree family; graded zeta against quadrature of the
    # graded heat trace
    d = np.array([[1.3, 0.2], [0.0, 2.0]])
    cx = GradedMatrixComplex([d], (2, 2))
    fam = eigendecompose(assemble_laplacians(cx))
    for s in (1.0, 2.0):
        direct = zeta_via_spectrum(fam, None, s)
        eig = np.concatenate(fam.eigenvalues)
        signs = np.concatenate(
            [np.full(len(w), (-1.0) ** k) for k, w in enumerate(fam.eigenvalues)]
        )
        oracle = heat_trace_mellin(eig, signs, s)
        assert abs(direct - oracle) < 1e-8


def test_commutation_residuals_recorded(exact2_small):
    cx = wl.assemble_circle_complex(exact2_small, 3.0)
    fam = assemble_laplacians(cx)
    assert len(fam.commutation_residuals) == 1
    assert fam.commutation_residuals[0] < 1e-12
