"""Dense Hermitian operators, full eigendecompositions and gap extraction.

Every exact-diagonalization path in the package goes through
``HermitianOperator`` / ``decompose``.  Operators live in dimensionless
energy units.  Real symmetric input is kept in float64 so LAPACK can use
the faster symmetric driver; complex input uses the Hermitian driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGroundState,
    InvalidParams,
    NoConvergence,
    NonHermitianInput,
)

HERMITICITY_ATOL = 1e-12
DEGENERACY_FACTOR = 1e-10     # default tolerance = factor * spectral range
ELEMENT_TOL_FACTOR = 1e-10    # default matrix-element cut = factor * ||H_I||_F


class HermitianOperator:
    """Dense Hermitian matrix with entries checked and frozen at construction.

    Entries within ``HERMITICITY_ATOL`` of Hermitian are symmetrized exactly,
    so downstream eigensolvers always see an exactly Hermitian matrix.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = np.asarray(entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise InvalidParams(f"operator must be a square matrix, got shape {arr.shape}")
        if np.iscomplexobj(arr):
            if np.any(arr.imag):
                arr = arr.astype(np.complex128, copy=False)
            else:
                arr = arr.real
        if not np.iscomplexobj(arr):
            arr = arr.astype(np.float64, copy=False)
        if not np.all(np.isfinite(arr)):
            raise InvalidParams("operator entries must be finite")
        deviation = float(np.max(np.abs(arr - arr.conj().T))) if arr.size > 1 else 0.0
        if deviation > HERMITICITY_ATOL:
            raise NonHermitianInput(
                f"matrix deviates from Hermiticity by {deviation:.3e} "
                f"(tolerance {HERMITICITY_ATOL:.0e})")
        arr = (arr + arr.conj().T) / 2
        arr.setflags(write=False)
        self.entries = arr

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim}, dtype={self.entries.dtype})"


@dataclass(frozen=True)
class ParametrizedHamiltonian:
    """Hamiltonian family H(lam) = h0 + lam * h_i with driving term h_i."""

    h0: HermitianOperator
    h_i: HermitianOperator
    lam: float

    def __post_init__(self):
        if self.h0.dim != self.h_i.dim:
            raise InvalidParams(
                f"h0 and h_i dimensions differ: {self.h0.dim} vs {self.h_i.dim}")
        if not math.isfinite(self.lam):
            raise InvalidParams("coupling must be finite")

    @property
    def dim(self) -> int:
        return self.h0.dim

    def assembled(self) -> HermitianOperator:
        """H(lam) as a HermitianOperator."""
        return HermitianOperator(self.h0.entries + self.lam * self.h_i.entries)

    def at_coupling(self, lam: float) -> "ParametrizedHamiltonian":
        """Same operator pair at a different coupling."""
        return ParametrizedHamiltonian(self.h0, self.h_i, float(lam))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Full eigensystem: eigenvalues ascending, eigenvector n in column n."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def spectral_range(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


def decompose(h: HermitianOperator) -> SpectralDecomposition:
    """Full eigendecomposition with a deterministic eigenvector gauge.

    The gauge fixes the phase of each eigenvector so its largest-magnitude
    component (lowest index on ties) is real and positive, which makes
    overlaps reproducible across runs.
    """
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(h.entries)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigensolver failed: {exc}") from exc
    lead_idx = np.argmax(np.abs(eigenvectors), axis=0)
    lead = eigenvectors[lead_idx, np.arange(eigenvectors.shape[1])]
    if np.iscomplexobj(eigenvectors):
        mags = np.abs(lead)
        mags[mags == 0.0] = 1.0
        eigenvectors = eigenvectors * (lead.conj() / mags)
    else:
        signs = np.where(lead < 0.0, -1.0, 1.0)
        eigenvectors = eigenvectors * signs
    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    return SpectralDecomposition(eigenvalues, eigenvectors)


def default_degeneracy_tol(d: SpectralDecomposition) -> float:
    # smallest-subnormal floor turns an exactly flat spectrum into a
    # degenerate verdict instead of a vacuous 0 < 0 comparison
    return max(DEGENERACY_FACTOR * d.spectral_range, 5e-324)


def ground_state(d: SpectralDecomposition,
                 degeneracy_tol: float | None = None) -> tuple[np.ndarray, float]:
    """Ground-state vector and the gap to the first excited state.

    Raises DegenerateGroundState when the gap falls below ``degeneracy_tol``
    (default: 1e-10 times the spectral range); the spectral-sum fidelity
    susceptibility is ill-defined there and the caller must move to a
    symmetry sector.  A one-dimensional spectrum has an infinite gap.
    """
    if degeneracy_tol is None:
        degeneracy_tol = default_degeneracy_tol(d)
    elif degeneracy_tol <= 0.0:
        raise InvalidParams("degeneracy_tol must be positive")
    if d.dim == 1:
        return d.eigenvectors[:, 0], math.inf
    gap = float(d.eigenvalues[1] - d.eigenvalues[0])
    if gap < degeneracy_tol:
        raise DegenerateGroundState(
            f"E1 - E0 = {gap:.3e} below tolerance {degeneracy_tol:.3e}")
    return d.eigenvectors[:, 0], gap


def excitation_elements(d: SpectralDecomposition,
                        h_i: HermitianOperator) -> tuple[np.ndarray, np.ndarray]:
    """Excitation energies E_n - E_0 and |<n|H_I|0>|^2 for n >= 1."""
    psi0 = d.eigenvectors[:, 0]
    elements = d.eigenvectors[:, 1:].conj().T @ (h_i.entries @ psi0)
    gaps = d.eigenvalues[1:] - d.eigenvalues[0]
    return gaps, np.abs(elements) ** 2


def relevant_gap(d: SpectralDecomposition,
                 h_i: HermitianOperator,
                 element_tol: float | None = None) -> float:
    """Gap to the lowest excitation actually connected by the driving term.

    Returns the minimum of E_n - E_0 over states with |<n|H_I|0>| above
    ``element_tol`` (default: 1e-10 times the Frobenius norm of H_I), or
    +inf when the driving term couples the ground state to nothing.
    """
    if element_tol is None:
        element_tol = ELEMENT_TOL_FACTOR * h_i.frobenius_norm()
    elif element_tol <= 0.0:
        raise InvalidParams("element_tol must be positive")
    gaps, weights = excitation_elements(d, h_i)
    connected = weights > element_tol ** 2
    if not np.any(connected):
        return math.inf
    return float(gaps[connected].min())
