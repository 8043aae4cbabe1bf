"""Infinite-range anisotropic spin model in the maximal collective sector.

H = -(1/N) sum_{i<j} (sx_i sx_j + gamma sy_i sy_j) - h sum_i sz_i

Rewriting pair sums through collective spins, sum_{i<j} s_a s_a =
2 S_a^2 - N/2, gives on the S = N/2 multiplet (dimension N+1)

    H = -(2/N) (S_x^2 + gamma S_y^2) + (1 + gamma)/2 - 2 h S_z,

with driving term H_I = -2 S_z and coupling h.  S_x^2 and S_y^2 only move
m by 0 or +-2, so H conserves the spin-flip parity (-1)^(S-m); H_I is
diagonal and conserves it too.  Restricting to the parity block that holds
the ground state removes the exponentially small symmetry-broken doublet
splitting without changing chi_F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams
from .fs import FsEstimate, fs_spectral
from .spectral import HermitianOperator, ParametrizedHamiltonian

GAMMA_GUARD = 1e-6  # the quoted critical behavior needs gamma != 1

BLOCKS = ("even", "odd", "full")


@dataclass(frozen=True)
class LmgParams:
    """N spins, anisotropy gamma and transverse field h (the coupling)."""

    n_spins: int
    gamma: float = 0.0
    field: float = 0.0

    def __post_init__(self):
        if self.n_spins < 2 or self.n_spins % 2 != 0:
            raise InvalidParams(f"n_spins must be a positive even integer, got {self.n_spins}")
        if abs(self.gamma - 1.0) <= GAMMA_GUARD:
            raise InvalidParams("gamma must differ from 1 (isotropic line is out of scope)")
        if not self.field >= 0.0:
            raise InvalidParams(f"field must be >= 0, got {self.field}")


def _collective_terms(n_spins: int):
    """Ladder data on the S = N/2 multiplet with m = -S..S ascending.

    Returns (m, diag, off) where diag is the shared diagonal of S_x^2 and
    S_y^2 and off[k] couples m[k] to m[k] + 2 in S_x^2 (with opposite sign
    in S_y^2).
    """
    s = n_spins / 2.0
    m = np.arange(-n_spins // 2, n_spins // 2 + 1, dtype=np.float64)
    c_plus = np.sqrt(np.clip(s * (s + 1.0) - m * (m + 1.0), 0.0, None))
    c_minus = np.sqrt(np.clip(s * (s + 1.0) - m * (m - 1.0), 0.0, None))
    diag = (c_plus ** 2 + c_minus ** 2) / 4.0
    off = c_plus[:-2] * c_plus[1:-1] / 4.0
    return m, diag, off


def build_lmg(params: LmgParams, block: str = "even") -> ParametrizedHamiltonian:
    """Operator pair (H0, H_I) on a parity block of the collective sector.

    ``block`` selects the spin-flip parity (-1)^(S-m): "even" (contains the
    polarized state m = S and, for h > 0 and gamma < 1, the ground state;
    validated against the odd block and full ED in the test suite), "odd",
    or "full" for the unrestricted N+1 dimensional multiplet.
    """
    if block not in BLOCKS:
        raise InvalidParams(f"block must be one of {BLOCKS}, got {block!r}")
    n = params.n_spins
    gamma = params.gamma
    m, diag, off = _collective_terms(n)
    dim = n + 1
    if block == "full":
        keep = np.arange(dim)
    else:
        parity = 0 if block == "even" else 1
        keep = np.flatnonzero((n - np.arange(dim)) % 2 == parity)  # S - m = N - index

    mb = m[keep]
    nb = keep.size
    h0 = np.zeros((nb, nb))
    idx = np.arange(nb)
    h0[idx, idx] = -(2.0 / n) * (1.0 + gamma) * diag[keep] + (1.0 + gamma) / 2.0
    if block == "full":
        # m -> m + 2 couplings sit two slots apart
        coup = -(2.0 / n) * (1.0 - gamma) * off
        h0[idx[:-2] + 2, idx[:-2]] = coup
        h0[idx[:-2], idx[:-2] + 2] = coup
    else:
        # within a parity block consecutive entries differ by Delta m = 2
        coup = -(2.0 / n) * (1.0 - gamma) * off[keep[:-1]]
        h0[idx[1:], idx[:-1]] = coup
        h0[idx[:-1], idx[1:]] = coup
    h_i = np.diag(-2.0 * mb)
    return ParametrizedHamiltonian(HermitianOperator(h0), HermitianOperator(h_i),
                                   lam=params.field)


def lmg_fs(params: LmgParams, block: str = "even") -> FsEstimate:
    """chi_F(h) by the spectral sum on the block-restricted Hamiltonian."""
    return fs_spectral(build_lmg(params, block=block))
