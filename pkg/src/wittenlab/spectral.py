"""Generic engines for graded matrix complexes.

A graded complex is a finite sequence of complex matrices d_k mapping degree-k
coefficient vectors to degree-(k+1) vectors with d_{k+1} d_k = 0.  This module
assembles the associated Laplacians, decomposes them, splits their spectra at
the fixed threshold 1, and evaluates heat supertraces and spectral zeta sums.

Everything is dense and exact at desk scale; values are immutable after
construction, so instances can be shared freely between threads and parameter
sweeps can run in parallel.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import isfinite

import numpy as np

from .errors import (
    AmbiguousKernel,
    DomainError,
    NotAComplex,
    NumericalError,
    ShapeError,
)

__all__ = [
    "SpectralParameter",
    "GradedMatrixComplex",
    "GradedLaplacianFamily",
    "SpectralSplit",
    "assemble_laplacians",
    "eigendecompose",
    "split_small_large",
    "heat_supertrace",
    "zeta_via_spectrum",
    "betti_numbers",
]

#: Relative scale for treating an eigenvalue as zero; see also kernel_tolerance.
KERNEL_TOL_FACTOR = 1e-9

#: Default relative tolerance factor for d^2 residuals of discretized sources.
COMPLEX_TOL_FACTOR = 1e-10

#: Tolerance factor for combinatorially exact (graph-built) differentials.
EXACT_COMPLEX_TOL_FACTOR = 1e-13

_TOL_PSD = 1e-8
_TOL_EIG = 1e-12
_TOL_UNITARY = 1e-10

SUBSETS = ("all", "perp", "small", "large")


@dataclass(frozen=True)
class SpectralParameter:
    """Complex deformation parameter z = mu + i nu."""

    mu: float
    nu: float = 0.0

    def __post_init__(self):
        if not (isfinite(self.mu) and isfinite(self.nu)):
            raise DomainError("deformation parameter must have finite parts")

    @property
    def z(self) -> complex:
        return complex(self.mu, self.nu)

    @classmethod
    def of(cls, value) -> "SpectralParameter":
        if isinstance(value, SpectralParameter):
            return value
        z = complex(value)
        return cls(z.real, z.imag)


class GradedMatrixComplex:
    """Per-degree differentials d_k of shape N_{k+1} x N_k with d^2 = 0.

    Parameters
    ----------
    differentials:
        Sequence of complex matrices; entry k maps degree k to degree k+1.
        May be empty for a complex concentrated in one degree.
    degrees:
        Dimensions N_0..N_n.  Required when ``differentials`` is empty or
        does not determine the degree sizes.
    exact:
        Combinatorially exact source (graph-built): a much tighter d^2
        tolerance applies.  Bitwise zero is not required because BLAS
        summation order is unspecified; exactness of graph sources is
        certified separately at the graph level.
    """

    def __init__(self, differentials, degrees=None, label="", exact=False):
        mats = [np.asarray(d, dtype=complex) for d in differentials]
        if degrees is None:
            if not mats:
                raise ShapeError("degrees required when no differentials are given")
            degrees = [mats[0].shape[1]] + [d.shape[0] for d in mats]
        degrees = tuple(int(n) for n in degrees)
        if any(n < 0 for n in degrees):
            raise ShapeError("degree dimensions must be nonnegative")
        if len(mats) != max(len(degrees) - 1, 0):
            raise ShapeError(
                f"expected {max(len(degrees) - 1, 0)} differentials for "
                f"{len(degrees)} degrees, got {len(mats)}"
            )
        for k, d in enumerate(mats):
            if d.shape != (degrees[k + 1], degrees[k]):
                raise ShapeError(
                    f"d_{k} has shape {d.shape}, expected "
                    f"({degrees[k + 1]}, {degrees[k]})"
                )
        self.degrees = degrees
        self.differentials = tuple(mats)
        self.label = label
        self.exact = bool(exact)
        norm = max((np.linalg.norm(d, 2) for d in mats if d.size), default=0.0)
        factor = EXACT_COMPLEX_TOL_FACTOR if exact else COMPLEX_TOL_FACTOR
        self.tol_complex = factor * max(norm**2, 1e-300)
        self._check_square()

    @property
    def top_degree(self) -> int:
        return len(self.degrees) - 1

    def _check_square(self):
        for k in range(len(self.differentials) - 1):
            a, b = self.differentials[k + 1], self.differentials[k]
            if a.size == 0 or b.size == 0:
                continue
            residual = np.linalg.norm(a @ b, 2)
            if residual > self.tol_complex:
                raise NotAComplex(
                    f"||d_{k + 1} d_{k}|| = {residual:.3e} exceeds "
                    f"tol {self.tol_complex:.3e}"
                )

    def differential(self, k) -> np.ndarray:
        """d_k as a matrix, including the zero maps below/above the range."""
        if 0 <= k < len(self.differentials):
            return self.differentials[k]
        if k == -1:
            return np.zeros((self.degrees[0], 0), dtype=complex)
        if k == self.top_degree:
            return np.zeros((0, self.degrees[-1]), dtype=complex)
        raise ShapeError(f"degree {k} outside range 0..{self.top_degree - 1}")

    def unitary_conjugate(self, unitaries) -> "GradedMatrixComplex":
        """Change basis degreewise: d_k -> U_{k+1} d_k U_k^dagger."""
        if len(unitaries) != len(self.degrees):
            raise ShapeError("one unitary per degree required")
        new = [
            unitaries[k + 1] @ d @ unitaries[k].conj().T
            for k, d in enumerate(self.differentials)
        ]
        return GradedMatrixComplex(new, self.degrees, self.label, self.exact)


class GradedLaplacianFamily:
    """Hermitian Laplacians D_k = d_k^* d_k + d_{k-1} d_{k-1}^* per degree.

    Spectra are cached after :func:`eigendecompose`; the matrices themselves
    never change after construction.
    """

    def __init__(self, laplacians, complex_=None, commutation_residuals=None):
        self.laplacians = tuple(np.asarray(m, dtype=complex) for m in laplacians)
        self.complex = complex_
        self.commutation_residuals = tuple(commutation_residuals or ())
        self.eigenvalues = None
        self.eigenframes = None
        for k, m in enumerate(self.laplacians):
            if m.shape[0] != m.shape[1]:
                raise ShapeError(f"Laplacian {k} is not square")
            if m.size and np.linalg.norm(m - m.conj().T, 2) > _TOL_PSD * (
                1.0 + np.linalg.norm(m, 2)
            ):
                raise ShapeError(f"Laplacian {k} is not Hermitian")

    @classmethod
    def from_matrices(cls, matrices) -> "GradedLaplacianFamily":
        """Wrap explicitly given Hermitian PSD matrices (one per degree)."""
        return cls(matrices)

    @property
    def degrees(self):
        return tuple(m.shape[0] for m in self.laplacians)

    def require_spectra(self) -> "GradedLaplacianFamily":
        if self.eigenvalues is None:
            eigendecompose(self)
        return self

    def max_eigenvalue(self) -> float:
        self.require_spectra()
        return max((v[-1] for v in self.eigenvalues if v.size), default=0.0)

    def kernel_tolerance(self) -> float:
        """Scale-aware numeric-zero threshold for eigenvalues."""
        return KERNEL_TOL_FACTOR * (1.0 + self.max_eigenvalue())


@dataclass(frozen=True)
class SpectralSplit:
    """Indices of eigenvalues <= 1 (small) and > 1 (large), per degree."""

    small: tuple
    large: tuple

    @property
    def small_counts(self):
        return tuple(len(i) for i in self.small)

    @property
    def large_counts(self):
        return tuple(len(i) for i in self.large)


def assemble_laplacians(complex_: GradedMatrixComplex) -> GradedLaplacianFamily:
    """Build the per-degree Laplacians of a graded complex.

    Records the relative commutation residuals ||d_k D_k - D_{k+1} d_k||,
    the discrete shadow of the intertwining of consecutive Laplacians by
    the differential.
    """
    n = complex_.top_degree
    laps = []
    for k in range(n + 1):
        dk = complex_.differential(k)
        dkm1 = complex_.differential(k - 1)
        lap = np.zeros((complex_.degrees[k], complex_.degrees[k]), dtype=complex)
        if dk.size:
            lap += dk.conj().T @ dk
        if dkm1.size:
            lap += dkm1 @ dkm1.conj().T
        laps.append(lap)
    residuals = []
    for k in range(n):
        dk = complex_.differential(k)
        if not dk.size:
            residuals.append(0.0)
            continue
        num = np.linalg.norm(dk @ laps[k] - laps[k + 1] @ dk, 2)
        den = np.linalg.norm(dk, 2) * (
            1.0 + max(np.linalg.norm(laps[k], 2), np.linalg.norm(laps[k + 1], 2))
        )
        residuals.append(num / den if den else 0.0)
    return GradedLaplacianFamily(laps, complex_, residuals)


def eigendecompose(family: GradedLaplacianFamily) -> GradedLaplacianFamily:
    """Dense Hermitian eigendecomposition per degree, cached on the family."""
    values, frames = [], []
    for k, m in enumerate(family.laplacians):
        if m.size == 0:
            values.append(np.zeros(0))
            frames.append(np.zeros((0, 0), dtype=complex))
            continue
        try:
            w, u = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
            raise NumericalError(f"eigensolver failed in degree {k}: {exc}")
        scale = max(abs(w[0]), abs(w[-1]), 1e-300)
        if w[0] < -_TOL_PSD * scale:
            raise NumericalError(
                f"Laplacian {k} indefinite: min eigenvalue {w[0]:.3e}"
            )
        recon = np.linalg.norm(m - (u * w) @ u.conj().T, 2)
        if recon > max(_TOL_EIG * np.linalg.norm(m, 2), 1e3 * np.finfo(float).eps):
            raise NumericalError(f"eigendecomposition residual {recon:.3e}")
        gram = np.linalg.norm(u.conj().T @ u - np.eye(m.shape[0]), 2)
        if gram > _TOL_UNITARY * m.shape[0]:
            raise NumericalError(f"eigenframe not unitary: {gram:.3e}")
        values.append(np.maximum(w, 0.0))
        frames.append(u)
    family.eigenvalues = tuple(values)
    family.eigenframes = tuple(frames)
    return family


def betti_numbers(family: GradedLaplacianFamily, warn_ambiguous=True):
    """Numeric kernel dimensions per degree, under the scale-aware threshold."""
    family.require_spectra()
    tol = family.kernel_tolerance()
    counts = []
    for w in family.eigenvalues:
        counts.append(int(np.count_nonzero(w < tol)))
        if warn_ambiguous and w.size:
            near = np.count_nonzero((w >= tol / 10.0) & (w <= tol * 10.0))
            if near:
                warnings.warn(
                    f"{near} eigenvalue(s) within 10x of the kernel threshold "
                    f"{tol:.3e}",
                    AmbiguousKernel,
                    stacklevel=2,
                )
    return tuple(counts)


def split_small_large(family: GradedLaplacianFamily) -> SpectralSplit:
    """Partition each degree's spectrum at the fixed threshold 1."""
    family.require_spectra()
    small, large = [], []
    for w in family.eigenvalues:
        idx = np.arange(w.size)
        small.append(tuple(idx[w <= 1.0]))
        large.append(tuple(idx[w > 1.0]))
    return SpectralSplit(tuple(small), tuple(large))


def _subset_mask(w, subset, tol):
    if subset == "all":
        return np.ones_like(w, dtype=bool)
    if subset == "perp":
        return w >= tol
    if subset == "small":
        return w <= 1.0
    if subset == "large":
        return w > 1.0
    raise DomainError(f"subset must be one of {SUBSETS}, got {subset!r}")


def _weight_diagonal(family, weight, k, frame):
    """Diagonal <B psi_j, psi_j> of the degree-k weight in the eigenframe."""
    if weight is None:
        return np.ones(frame.shape[1])
    if np.isscalar(weight):
        return np.full(frame.shape[1], complex(weight))
    wk = np.asarray(weight[k], dtype=complex)
    if wk.ndim == 0:
        return np.full(frame.shape[1], complex(wk))
    if wk.shape != (frame.shape[0], frame.shape[0]):
        raise ShapeError(
            f"weight for degree {k} has shape {wk.shape}, "
            f"expected ({frame.shape[0]}, {frame.shape[0]})"
        )
    return np.einsum("ij,jk,ki->i", frame.conj().T, wk, frame)


def heat_supertrace(family, weight, t, subset="all") -> complex:
    """Degree-alternating trace of B e^{-t D} restricted to a spectral subset.

    ``weight`` may be None (identity), a scalar, or a per-degree sequence of
    matrices/scalars.  ``subset`` selects all eigenvalues, the orthogonal
    complement of the kernel, or the small/large branches of the spectrum.
    """
    if t <= 0:
        raise DomainError("heat time t must be positive")
    family.require_spectra()
    tol = family.kernel_tolerance()
    total = 0.0 + 0.0j
    for k, (w, u) in enumerate(zip(family.eigenvalues, family.eigenframes)):
        if w.size == 0:
            continue
        mask = _subset_mask(w, subset, tol)
        if not mask.any():
            continue
        diag = _weight_diagonal(family, weight, k, u)
        total += (-1.0) ** k * np.sum(np.exp(-t * w[mask]) * diag[mask])
    return complex(total)


def zeta_via_spectrum(family, weight, s, lambda_cut=0.0, graded=True) -> complex:
    """Finite eigen-sum  sum_j  lambda_j^{-s} <B psi_j, psi_j>.

    Only eigenvalues above max(lambda_cut, numeric kernel threshold) enter,
    so the kernel never contributes.  With ``graded`` set, degree k carries
    the sign (-1)^k.  Sums are exact at desk scale; no meromorphic
    continuation is attempted.
    """
    if lambda_cut < 0:
        raise DomainError("lambda_cut must be nonnegative")
    family.require_spectra()
    cut = max(float(lambda_cut), family.kernel_tolerance())
    s = complex(s)
    total = 0.0 + 0.0j
    for k, (w, u) in enumerate(zip(family.eigenvalues, family.eigenframes)):
        if w.size == 0:
            continue
        mask = w > cut
        if not mask.any():
            continue
        diag = _weight_diagonal(family, weight, k, u)
        sign = (-1.0) ** k if graded else 1.0
        total += sign * np.sum(w[mask] ** (-s) * diag[mask])
    return complex(total)
