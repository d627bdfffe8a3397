"""Numpy implementation of the plan-grid kernel (fallback backend)."""

import numpy as np


def _occupancy(offs: np.ndarray, boxes: np.ndarray, tau: float) -> np.ndarray:
    """Cells whose center lies inside any box advanced to lead time tau.

    boxes rows: rel_x, rel_y, vx, vy, cos_yaw, sin_yaw, half_len, half_wid
    (half extents already inflated). Window bounds only need to cover the
    box circumradius; the in-box test decides.
    """
    n = offs.shape[0]
    occ = np.zeros((n, n), dtype=np.uint8)
    for b in boxes:
        bx = b[0] + b[2] * tau
        by = b[1] + b[3] * tau
        cy, sy, hl, hw = b[4], b[5], b[6], b[7]
        r = np.hypot(hl, hw)
        i0 = np.searchsorted(offs, bx - r, "left")
        i1 = np.searchsorted(offs, bx + r, "right")
        j0 = np.searchsorted(offs, by - r, "left")
        j1 = np.searchsorted(offs, by + r, "right")
        if i0 >= i1 or j0 >= j1:
            continue
        dx = offs[i0:i1] - bx
        dy = offs[j0:j1] - by
        u = dy[:, None] * sy + dx[None, :] * cy
        v = dy[:, None] * cy - dx[None, :] * sy
        inside = (np.abs(u) <= hl) & (np.abs(v) <= hw)
        occ[j0:j1, i0:i1] |= inside
    return occ


def plan_grids(
    n: int,
    cell: float,
    steps: int,
    dt: float,
    prior_centers: np.ndarray,
    boxes: np.ndarray,
    prior_w: float,
    obs_w: float,
    beta: float,
    eps: float,
) -> np.ndarray:
    """Per-step position distributions over the ego-centered grid.

    Cell (j, i) sits at offset ((i - m) * cell, (j - m) * cell) from the
    ego. Cost is a quadratic pull toward prior_centers[t] plus a flat
    penalty on occupied cells; each step grid is the softmax of -beta *
    cost, floored at eps and renormalized.
    """
    m = (n - 1) // 2
    offs = (np.arange(n, dtype=np.float64) - m) * cell
    xx, yy = np.meshgrid(offs, offs)
    out = np.empty((steps, n, n), dtype=np.float64)
    for t in range(steps):
        tau = (t + 1) * dt
        cost = prior_w * ((xx - prior_centers[t, 0]) ** 2 + (yy - prior_centers[t, 1]) ** 2)
        if obs_w != 0.0 and boxes.shape[0] > 0:
            cost = cost + obs_w * _occupancy(offs, boxes, tau)
        p = np.exp(-beta * (cost - cost.min()))
        p /= p.sum()
        np.maximum(p, eps, out=p)
        p /= p.sum()
        out[t] = p
    return out
