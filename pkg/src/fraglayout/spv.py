"""Smallest-position-value decoding of continuous vectors into permutations."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ContractViolation


def spv_decode(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Permutation listing dimension indices by ascending position value.

    Ties break toward the lower index (stable), so decoding is deterministic
    and invariant under any strictly increasing transform of the values.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ContractViolation(f"position vector must be 1-D and non-empty, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ContractViolation("position vector contains NaN or infinity")
    return np.argsort(x, kind="stable")
