# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled plan-grid kernel. Same contract as _plan_py.plan_grids."""

from libc.math cimport exp, hypot, fabs

import numpy as np


def plan_grids(int n, double cell, int steps, double dt,
               double[:, ::1] prior_centers, double[:, ::1] boxes,
               double prior_w, double obs_w, double beta, double eps):
    out_arr = np.empty((steps, n, n), dtype=np.float64)
    occ_arr = np.zeros((n, n), dtype=np.uint8)
    offs_arr = np.empty(n, dtype=np.float64)

    cdef double[:, :, ::1] out = out_arr
    cdef unsigned char[:, ::1] occ = occ_arr
    cdef double[::1] offs = offs_arr
    cdef int m = (n - 1) // 2
    cdef int nb = boxes.shape[0]
    cdef int t, i, j, k, i0, i1, j0, j1
    cdef double tau, px, py, bx, by, cy, sy, hl, hw, r, dx, dy, u, v
    cdef double c, cmin, s, q
    cdef bint with_obstacles = obs_w != 0.0 and nb > 0

    for i in range(n):
        offs[i] = (i - m) * cell

    for t in range(steps):
        tau = (t + 1) * dt

        if with_obstacles:
            for j in range(n):
                for i in range(n):
                    occ[j, i] = 0
            for k in range(nb):
                bx = boxes[k, 0] + boxes[k, 2] * tau
                by = boxes[k, 1] + boxes[k, 3] * tau
                cy = boxes[k, 4]
                sy = boxes[k, 5]
                hl = boxes[k, 6]
                hw = boxes[k, 7]
                r = hypot(hl, hw)
                # Conservative window; the exact in-box test decides.
                i0 = <int>((bx - r) / cell) + m - 1
                i1 = <int>((bx + r) / cell) + m + 1
                j0 = <int>((by - r) / cell) + m - 1
                j1 = <int>((by + r) / cell) + m + 1
                if i0 < 0: i0 = 0
                if j0 < 0: j0 = 0
                if i1 > n - 1: i1 = n - 1
                if j1 > n - 1: j1 = n - 1
                for j in range(j0, j1 + 1):
                    dy = offs[j] - by
                    for i in range(i0, i1 + 1):
                        dx = offs[i] - bx
                        u = dy * sy + dx * cy
                        v = dy * cy - dx * sy
                        if fabs(u) <= hl and fabs(v) <= hw:
                            occ[j, i] = 1

        px = prior_centers[t, 0]
        py = prior_centers[t, 1]
        cmin = 0.0
        for j in range(n):
            dy = offs[j] - py
            for i in range(n):
                dx = offs[i] - px
                c = prior_w * (dx * dx + dy * dy)
                if with_obstacles and occ[j, i]:
                    c += obs_w
                out[t, j, i] = c
                if (j == 0 and i == 0) or c < cmin:
                    cmin = c

        s = 0.0
        for j in range(n):
            for i in range(n):
                q = exp(-beta * (out[t, j, i] - cmin))
                out[t, j, i] = q
                s += q
        for j in range(n):
            for i in range(n):
                out[t, j, i] /= s

        s = 0.0
        for j in range(n):
            for i in range(n):
                q = out[t, j, i]
                if q < eps:
                    q = eps
                    out[t, j, i] = eps
                s += q
        for j in range(n):
            for i in range(n):
                out[t, j, i] /= s

    return out_arr
