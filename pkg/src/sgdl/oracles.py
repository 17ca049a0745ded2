"""Slow reference implementations used to cross-check the fast paths."""

from __future__ import annotations

import itertools

import numpy as np


def naive_partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace by explicit loops over every multi-index."""
    dims = list(dims)
    keep = sorted(keep)
    traced = [i for i in range(len(dims)) if i not in keep]
    kdims = [dims[i] for i in keep]
    out = np.zeros((int(np.prod(kdims)), int(np.prod(kdims))), dtype=complex)

    def flat(idx):
        f = 0
        for i, d in zip(idx, dims):
            f = f * d + i
        return f

    for a in itertools.product(*(range(d) for d in kdims)):
        for b in itertools.product(*(range(d) for d in kdims)):
            total = 0j
            for e in itertools.product(*(range(dims[i]) for i in traced)):
                row = [0] * len(dims)
                col = [0] * len(dims)
                for pos, i in enumerate(keep):
                    row[i], col[i] = a[pos], b[pos]
                for pos, i in enumerate(traced):
                    row[i] = col[i] = e[pos]
                total += rho[flat(row), flat(col)]
            ra = 0
            for i, d in zip(a, kdims):
                ra = ra * d + i
            rb = 0
            for i, d in zip(b, kdims):
                rb = rb * d + i
            out[ra, rb] = total
    return out
