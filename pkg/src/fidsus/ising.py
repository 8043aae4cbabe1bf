"""Transverse-field Ising chain, periodic boundary conditions.

Convention (fixed here; the dense-ED cross-check is the arbiter):

    H = - sum_i sx_i sx_{i+1} - h sum_i sz_i,   H_I = - sum_i sz_i,

with sx_{L+1} = sx_1, so for L = 2 the single pair is counted twice.
Small chains (L <= 12) get the full 2^L dense operator pair; even L gets
the Jordan-Wigner/Bogoliubov closed form

    chi_F(h) = (1/4) sum_{k>0} [d theta_k / d h]^2,
    tan theta_k = sin k / (h - cos k),  k = (2n+1) pi / L,

i.e. chi_F = (1/4) sum_{k>0} sin^2 k / (h^2 - 2 h cos k + 1)^2 over the
antiperiodic (even-parity) momenta, which scales past L = 10^6.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, TooLarge
from .fs import FsEstimate, FsMethod
from .spectral import HermitianOperator, ParametrizedHamiltonian
from .sums import csum

ED_MAX_LENGTH = 12


@dataclass(frozen=True)
class IsingParams:
    """Chain length L, transverse field h (the coupling), periodic only."""

    length: int
    field: float
    boundary: str = "periodic"

    def __post_init__(self):
        if self.length < 1:
            raise InvalidParams(f"length must be positive, got {self.length}")
        if not self.field >= 0.0:
            raise InvalidParams(f"field must be >= 0, got {self.field}")
        if self.boundary != "periodic":
            raise InvalidParams("only periodic boundaries are supported")


def build_ising_ed(params: IsingParams) -> ParametrizedHamiltonian:
    """Dense 2^L operator pair; refuses L beyond the ED cap."""
    length = params.length
    if length > ED_MAX_LENGTH:
        raise TooLarge(
            f"dense ED capped at L = {ED_MAX_LENGTH} (dim 4096), got L = {length}")
    dim = 1 << length
    states = np.arange(dim)
    # sz eigenvalue per site: bit clear -> +1, bit set -> -1
    popcount = np.array([int(s).bit_count() for s in range(dim)], dtype=np.int64)
    sz_total = (length - 2 * popcount).astype(np.float64)

    h0 = np.zeros((dim, dim))
    for site in range(length):
        mask = (1 << site) | (1 << ((site + 1) % length))
        h0[states ^ mask, states] += -1.0
    h_i = np.diag(-sz_total)
    return ParametrizedHamiltonian(HermitianOperator(h0), HermitianOperator(h_i),
                                   lam=params.field)


def ising_fs_freefermion(params: IsingParams) -> FsEstimate:
    """Closed-form chi_F over the even-parity momentum grid.

    Requires even L >= 4 (momenta pair as +-k).  Validated against
    build_ising_ed in the test suite before anything trusts it.
    """
    length, h = params.length, params.field
    if length < 4 or length % 2 != 0:
        raise InvalidParams(
            f"free-fermion path needs even L >= 4, got L = {length}")
    n = np.arange(length // 2)
    k = (2 * n + 1) * np.pi / length
    denom = h * h - 2.0 * h * np.cos(k) + 1.0
    terms = (np.sin(k) / denom) ** 2
    return FsEstimate(value=0.25 * csum(terms), method=FsMethod.CLOSED_FORM)
