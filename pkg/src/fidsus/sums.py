"""Deterministic floating-point reductions.

Large spectral and momentum sums in this package accumulate with
``math.fsum`` (Shewchuk compensated summation, exactly rounded) so results
are independent of term ordering and of how work is partitioned across
workers.  Row-style 2D sums reduce each row with numpy's fixed-shape
pairwise sum and combine row totals with ``csum``.
"""

import math

import numpy as np


def csum(values) -> float:
    """Exactly rounded sum of a 1D float array or iterable."""
    arr = np.asarray(values, dtype=np.float64)
    return math.fsum(arr.tolist())


def pairwise_tree(values) -> float:
    """Fixed-shape binary reduction tree over an ordered list of floats.

    The tree shape depends only on ``len(values)``, so partial evaluation by
    any contiguous partition reproduces the serial result bit for bit.
    """
    vals = [float(v) for v in values]
    if not vals:
        return 0.0
    while len(vals) > 1:
        vals = [vals[i] + vals[i + 1] if i + 1 < len(vals) else vals[i]
                for i in range(0, len(vals), 2)]
    return vals[0]
