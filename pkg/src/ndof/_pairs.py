"""Blocked double sums over sample pairs of two sampled regions."""

import itertools

import numpy as np

from .errors import InvalidArgument, RegionsOverlap

# elements per temporary (pairs x ambient_dim doubles stays ~ 50 MB)
_BLOCK_ELEMENTS = 2_000_000


def row_blocks(n_rows, n_cols, max_elements=_BLOCK_ELEMENTS):
    step = max(1, max_elements // max(1, n_cols))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def check_compatible(T, R):
    if T.ambient_dim != R.ambient_dim:
        raise InvalidArgument(
            f"regions live in different spaces ({T.ambient_dim}D vs {R.ambient_dim}D)")


def separation(T, R, min_distance=0.0):
    """Smallest pairwise sample distance; raises if below ``min_distance``."""
    check_compatible(T, R)
    best = np.inf
    for rows in row_blocks(len(T), len(R)):
        diff = R.points[None, :, :] - T.points[rows, None, :]
        best = min(best, float(np.sqrt(np.min(np.einsum("ijk,ijk->ij", diff, diff)))))
    if best <= min_distance:
        raise RegionsOverlap(
            f"regions overlap: closest sample pair is {best:.3e} m apart "
            f"(minimum allowed {min_distance:.3e} m)")
    return best


def _sub_offsets(cell_edges, q):
    """Offsets of the q^m sub-cell midpoints for every cell, shape (N, q^m, dim)."""
    n, m, dim = cell_edges.shape
    ticks = (np.arange(q) + 0.5) / q - 0.5
    grid = np.array(list(itertools.product(ticks, repeat=m)))  # (q^m, m)
    return np.einsum("sm,nmd->nsd", grid, cell_edges)


def pair_sum(T, R, integrand, refine=4, near_factor=3.0):
    """Midpoint-rule double sum ``sum_ij wT_i wR_j f(...)``.

    ``integrand(rvec, dist, n_t, n_r)`` receives ``rvec = r_R - r_T`` with
    trailing axis of length ``ambient_dim`` and broadcastable normals.

    Pairs closer than ``near_factor`` times the sum of the two cell
    diameters are re-integrated on ``refine`` x finer sub-cells in every
    parametric direction, which is where a 1/R^p kernel spoils the
    midpoint rule.
    """
    check_compatible(T, R)
    total = 0.0
    diam_t = np.linalg.norm(T.cell_edges.sum(axis=1), axis=-1)
    diam_r = np.linalg.norm(R.cell_edges.sum(axis=1), axis=-1)
    near_i, near_j = [], []
    for rows in row_blocks(len(T), len(R)):
        rvec = R.points[None, :, :] - T.points[rows, None, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", rvec, rvec))
        if np.any(dist <= 0):
            raise RegionsOverlap("coincident samples in pair integral")
        f = integrand(rvec, dist, T.normals[rows, None, :], R.normals[None, :, :])
        contrib = T.weights[rows, None] * R.weights[None, :] * f
        if refine > 1:
            near = dist < near_factor * (diam_t[rows, None] + diam_r[None, :])
            if near.any():
                i, j = np.nonzero(near)
                near_i.append(i + rows.start)
                near_j.append(j)
                contrib[near] = 0.0
        total += float(np.sum(contrib))
    if refine > 1 and near_i:
        total += _refined(T, R, np.concatenate(near_i), np.concatenate(near_j), integrand, refine)
    return total


def _refined(T, R, ii, jj, integrand, q):
    off_t = _sub_offsets(T.cell_edges, q)
    off_r = _sub_offsets(R.cell_edges, q)
    st, sr = off_t.shape[1], off_r.shape[1]
    chunk = max(1, _BLOCK_ELEMENTS // (st * sr))
    total = 0.0
    for start in range(0, len(ii), chunk):
        i = ii[start:start + chunk]
        j = jj[start:start + chunk]
        pt = T.points[i][:, None, :] + off_t[i]
        pr = R.points[j][:, None, :] + off_r[j]
        rvec = pr[:, None, :, :] - pt[:, :, None, :]
        dist = np.sqrt(np.einsum("pabk,pabk->pab", rvec, rvec))
        if np.any(dist <= 0):
            raise RegionsOverlap("coincident sub-samples in refined pair integral")
        f = integrand(rvec, dist, T.normals[i][:, None, None, :], R.normals[j][:, None, None, :])
        w = (T.weights[i] * R.weights[j]) / (st * sr)
        total += float(np.sum(w * f.sum(axis=(1, 2))))
    return total


def pair_extrema(T, R, values):
    """Min and max of ``values(rvec, dist, n_t, n_r)`` over all sample pairs."""
    check_compatible(T, R)
    lo, hi = np.inf, -np.inf
    for rows in row_blocks(len(T), len(R)):
        rvec = R.points[None, :, :] - T.points[rows, None, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", rvec, rvec))
        v = values(rvec, dist, T.normals[rows, None, :], R.normals[None, :, :])
        lo = min(lo, float(v.min()))
        hi = max(hi, float(v.max()))
    return lo, hi
