"""Fidelity-susceptibility estimators and the gap-based inequality chain.

Three independent routes to chi_F for a ParametrizedHamiltonian:

* spectral sum        sum_{n>0} |<n|H_I|0>|^2 / (E_n - E_0)^2
* overlap limit       -2 ln F / dlam^2 with Richardson extrapolation
* correlator integral int_0^T tau G(tau) dtau by adaptive quadrature,
                      G(tau) = sum_{n>0} e^{-tau (E_n-E_0)} |<n|H_I|0>|^2

The overlap route differences ground states at lam -/+ dlam/2; centering
removes the odd term proportional to d(chi)/d(lam), which is what makes the
assumed O(dlam^2) error model (and the two-point Richardson step) valid.
The correlator route integrates numerically on purpose: it shares no
analytic shortcut with the spectral sum, so agreement between the two is a
real cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .errors import (
    DegenerateGroundState,
    InfiniteGap,
    InvalidParams,
    NoConvergence,
    UnboundedIntegral,
)
from .spectral import (
    HermitianOperator,
    ParametrizedHamiltonian,
    SpectralDecomposition,
    decompose,
    excitation_elements,
    ground_state,
    relevant_gap,
)
from .sums import csum

DEFAULT_DELTA_SCHEDULE = (1e-3, 5e-4, 2.5e-4)


class FsMethod(Enum):
    SPECTRAL = "spectral"
    OVERLAP = "overlap"
    CORRELATOR_INTEGRAL = "correlator"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class FsEstimate:
    """One chi_F value with its method tag and convergence metadata."""

    value: float
    method: FsMethod
    delta_lambda: float | None = None
    convergence_error: float | None = None

    def __post_init__(self):
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise InvalidParams(f"chi_F must be finite and >= 0, got {self.value}")
        if self.method is FsMethod.OVERLAP:
            if self.delta_lambda is None or self.delta_lambda <= 0.0:
                raise InvalidParams("overlap estimates must record delta_lambda > 0")


@dataclass(frozen=True)
class QuadratureSpec:
    """Adaptive-quadrature controls for the correlator route.

    The time integral runs on [0, tail_factor / Delta] where Delta is the
    relevant gap; gap_floor_factor (relative to the spectral range) decides
    when the gap counts as zero and the integral as unbounded.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-11
    max_subdivisions: int = 500
    tail_factor: float = 50.0
    gap_floor_factor: float = 1e-8


class _Prepared:
    """Decomposition plus excitation data shared by the estimators."""

    __slots__ = ("dec", "psi0", "gap", "gaps", "weights")

    def __init__(self, p: ParametrizedHamiltonian, degeneracy_tol=None):
        self.dec = decompose(p.assembled())
        self.psi0, self.gap = ground_state(self.dec, degeneracy_tol)
        self.gaps, self.weights = excitation_elements(self.dec, p.h_i)


def fs_spectral(p: ParametrizedHamiltonian,
                degeneracy_tol: float | None = None) -> FsEstimate:
    """chi_F from the spectral sum; exact to eigensolver precision."""
    prep = _Prepared(p, degeneracy_tol)
    value = csum(prep.weights / prep.gaps ** 2)
    return FsEstimate(value=value, method=FsMethod.SPECTRAL)


def _ground_vector(p: ParametrizedHamiltonian, lam: float) -> np.ndarray:
    dec = decompose(p.at_coupling(lam).assembled())
    psi, _ = ground_state(dec)
    return psi


def fidelity_overlap(p: ParametrizedHamiltonian, delta: float) -> float:
    """F(lam, lam + delta) = |<Psi0(lam)|Psi0(lam + delta)>| in [0, 1]."""
    if not (delta > 0.0 and math.isfinite(delta)):
        raise InvalidParams("delta must be positive and finite")
    a = _ground_vector(p, p.lam)
    b = _ground_vector(p, p.lam + delta)
    return min(float(np.abs(np.vdot(a, b))), 1.0)


def overlap_estimate(p: ParametrizedHamiltonian, delta: float) -> float:
    """Single centered estimate -2 ln F(lam - d/2, lam + d/2) / d^2.

    Error is O(delta^2); exposed so convergence-order checks can probe the
    raw sequence that fs_overlap extrapolates.
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise InvalidParams("delta must be positive and finite")
    a = _ground_vector(p, p.lam - delta / 2.0)
    b = _ground_vector(p, p.lam + delta / 2.0)
    f = min(float(np.abs(np.vdot(a, b))), 1.0)
    return -2.0 * math.log(f) / delta ** 2 if f > 0.0 else math.inf


def fs_overlap(p: ParametrizedHamiltonian,
               delta_schedule=DEFAULT_DELTA_SCHEDULE) -> FsEstimate:
    """Richardson-extrapolated overlap estimate of chi_F.

    The schedule must be strictly decreasing; each step assumes the
    O(delta^2) error model, so the extrapolant from the pair (d1, d2) is
    (e2*d1^2 - e1*d2^2) / (d1^2 - d2^2).  Divergence of the raw sequence
    (the schedule reaching below a quasi-degenerate gap, or a level
    crossing inside the window) raises NoConvergence.
    """
    deltas = [float(d) for d in delta_schedule]
    if len(deltas) < 2:
        raise InvalidParams("delta schedule needs at least two values")
    if any(d <= 0.0 for d in deltas) or any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise InvalidParams("delta schedule must be strictly decreasing and positive")

    raws = [overlap_estimate(p, d) for d in deltas]
    if any(not math.isfinite(r) for r in raws):
        raise NoConvergence("overlap fidelity vanished; couplings straddle a level crossing")
    scale = max(1.0, max(abs(r) for r in raws))
    diffs = [abs(b - a) for a, b in zip(raws, raws[1:])]
    for earlier, later in zip(diffs, diffs[1:]):
        if later > earlier and later > 1e-9 * scale:
            raise NoConvergence(
                "overlap estimates diverge as delta shrinks; "
                "schedule is not inside the O(delta^2) regime")

    extrapolants = []
    for (d1, r1), (d2, r2) in zip(zip(deltas, raws), zip(deltas[1:], raws[1:])):
        extrapolants.append((r2 * d1 ** 2 - r1 * d2 ** 2) / (d1 ** 2 - d2 ** 2))
    value = extrapolants[-1]
    if len(extrapolants) >= 2:
        conv_err = abs(extrapolants[-1] - extrapolants[-2])
    else:
        conv_err = abs(extrapolants[-1] - raws[-1])
    if value < 0.0:
        if abs(value) <= max(10.0 * conv_err, 1e-12):
            value = 0.0
        else:
            raise NoConvergence(f"extrapolated chi_F is negative: {value:.3e}")
    return FsEstimate(value=value, method=FsMethod.OVERLAP,
                      delta_lambda=deltas[-1], convergence_error=conv_err)


def fs_correlator(p: ParametrizedHamiltonian,
                  quadrature: QuadratureSpec = QuadratureSpec()) -> FsEstimate:
    """chi_F from the time integral of the connected correlator.

    G(tau) is evaluated through its spectral representation but the tau
    integral is done by adaptive quadrature on [0, tail_factor/Delta], so
    the route stays independent of the closed-form spectral sum.
    """
    prep = _Prepared(p)
    gap = relevant_gap(prep.dec, p.h_i)
    if math.isinf(gap):
        return FsEstimate(value=0.0, method=FsMethod.CORRELATOR_INTEGRAL,
                          convergence_error=0.0)
    gap_floor = max(quadrature.gap_floor_factor * prep.dec.spectral_range, 5e-324)
    if gap < gap_floor:
        raise UnboundedIntegral(
            f"relevant gap {gap:.3e} below floor {gap_floor:.3e}; "
            "tau integral does not converge")
    gaps, weights = prep.gaps, prep.weights
    horizon = quadrature.tail_factor / gap

    def integrand(tau: float) -> float:
        return tau * float(weights @ np.exp(-gaps * tau))

    value, abserr = quad(integrand, 0.0, horizon,
                         epsabs=quadrature.abs_tol, epsrel=quadrature.rel_tol,
                         limit=quadrature.max_subdivisions)
    return FsEstimate(value=max(value, 0.0), method=FsMethod.CORRELATOR_INTEGRAL,
                      convergence_error=abserr)


def energy_second_derivative(p: ParametrizedHamiltonian) -> float:
    """d^2 E_0 / d lam^2 = -2 sum_{n>0} |<n|H_I|0>|^2 / (E_n - E_0)."""
    prep = _Prepared(p)
    return -2.0 * csum(prep.weights / prep.gaps)


@dataclass(frozen=True)
class InequalityBounds:
    """chi <= mid <= upper with mid = -(1/2 Delta) E'' and upper = Var(H_I)/Delta^2."""

    chi: float
    mid: float
    upper: float

    def __iter__(self):
        return iter((self.chi, self.mid, self.upper))


def inequality_bounds(p: ParametrizedHamiltonian,
                      element_tol: float | None = None) -> InequalityBounds:
    """The gap inequality chain for chi_F.

    When H_I couples the ground state to nothing every bound is trivially
    zero and (0, 0, 0) is returned; an infinite gap coexisting with a
    variance above the element tolerance is inconsistent and raises
    InfiniteGap.
    """
    prep = _Prepared(p)
    gap = relevant_gap(prep.dec, p.h_i, element_tol)
    variance = csum(prep.weights)
    if math.isinf(gap):
        tol = element_tol if element_tol is not None else \
            1e-10 * p.h_i.frobenius_norm()
        if variance > p.dim * (10.0 * tol) ** 2:
            raise InfiniteGap(
                f"no coupled excitation found yet Var(H_I) = {variance:.3e}")
        return InequalityBounds(0.0, 0.0, 0.0)
    chi = csum(prep.weights / prep.gaps ** 2)
    mid = csum(prep.weights / prep.gaps) / gap
    upper = variance / gap ** 2
    return InequalityBounds(chi, mid, upper)
