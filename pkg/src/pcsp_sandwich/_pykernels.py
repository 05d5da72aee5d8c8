"""Numpy implementations of the enumeration kernels (fallback backend)."""

from __future__ import annotations

import numpy as np

_CHUNK_CELLS = 1 << 22


def _points(n: int, p: int) -> np.ndarray:
    return np.indices((n,) * p, dtype=np.int64).reshape(p, -1).T


def _rotation(n: int, p: int) -> np.ndarray:
    idx = np.arange(n**p, dtype=np.int64)
    lead, rest = np.divmod(idx, n ** (p - 1))
    return rest * n + lead


def linear_cyclic_mask(coeffs: np.ndarray, n: int, p: int, out_mod: int) -> np.ndarray:
    coeffs = np.ascontiguousarray(coeffs, dtype=np.int64)
    pts = _points(n, p)
    rot = _rotation(n, p)
    out = np.empty(len(coeffs), dtype=bool)
    step = max(1, _CHUNK_CELLS // max(1, len(pts)))
    for lo in range(0, len(coeffs), step):
        vals = (coeffs[lo : lo + step] @ pts.T) % p % out_mod
        out[lo : lo + step] = (vals == vals[:, rot]).all(axis=1)
    return out


def tables_cyclic_mask(tables: np.ndarray, rot: np.ndarray) -> np.ndarray:
    tables = np.asarray(tables, dtype=np.int64)
    return (tables == tables[:, rot]).all(axis=1)


def selection_orbit_scopes(
    T: np.ndarray, n: int, p: int, labels: np.ndarray, start: int, stop: int
) -> np.ndarray:
    T = np.asarray(T, dtype=np.int64)
    r = len(T)
    sel = np.arange(start, stop, dtype=np.int64)
    pts = np.zeros((len(sel), T.shape[1]), dtype=np.int64)
    for i in range(p):
        row = (sel // r ** (p - 1 - i)) % r
        pts = pts * n + T[row]
    return np.asarray(labels, dtype=np.int64)[pts]
