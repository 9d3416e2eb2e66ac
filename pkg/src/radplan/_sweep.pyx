# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backward/forward sweep for radial feeders."""
from libc.math cimport fabs, sqrt

import numpy as np


cdef inline double cabs2(double re, double im) nogil:
    return sqrt(re * re + im * im)


def sweep(const Py_ssize_t[:] parent, const double[:] zr, const double[:] zx,
          const double[:] p, const double[:] q, double tol, int max_iter):
    """Solve one radial power flow by current-summation sweeps.

    Node 0 is the slack at 1.0 p.u.; ``parent[k] < k`` for k >= 1 and the
    branch feeding node k has impedance ``zr[k] + j zx[k]``.  ``p``/``q`` are
    net consumed powers.  Returns ``(vr, vi, ir, ii, iterations, mismatch)``
    where the branch currents are recomputed from the final voltages.
    """
    cdef Py_ssize_t n = parent.shape[0]
    cdef Py_ssize_t k, m
    cdef int it = 0
    cdef double worst = 0.0
    cdef double den, yr, yi, dr, di, sr, si, cr, ci

    vr_a = np.ones(n)
    vi_a = np.zeros(n)
    jr_a = np.zeros(n)
    ji_a = np.zeros(n)
    ir_a = np.zeros(n)
    ii_a = np.zeros(n)
    nr_a = np.zeros(n)
    ni_a = np.zeros(n)
    cdef double[:] vr = vr_a
    cdef double[:] vi = vi_a
    cdef double[:] jr = jr_a
    cdef double[:] ji = ji_a
    cdef double[:] ir = ir_a
    cdef double[:] ii = ii_a
    cdef double[:] nr = nr_a
    cdef double[:] ni = ni_a

    with nogil:
        while it < max_iter:
            it += 1
            # backward: load currents conj(S / V), accumulated leaf -> root
            for k in range(n):
                den = vr[k] * vr[k] + vi[k] * vi[k]
                jr[k] = (p[k] * vr[k] + q[k] * vi[k]) / den
                ji[k] = (p[k] * vi[k] - q[k] * vr[k]) / den
            for k in range(n - 1, 0, -1):
                m = parent[k]
                jr[m] += jr[k]
                ji[m] += ji[k]
            # forward: voltage drops root -> leaf
            for k in range(1, n):
                m = parent[k]
                vr[k] = vr[m] - (zr[k] * jr[k] - zx[k] * ji[k])
                vi[k] = vi[m] - (zr[k] * ji[k] + zx[k] * jr[k])
            # mismatch from voltage-consistent branch currents
            for k in range(n):
                nr[k] = 0.0
                ni[k] = 0.0
            for k in range(1, n):
                m = parent[k]
                den = zr[k] * zr[k] + zx[k] * zx[k]
                yr = zr[k] / den
                yi = -zx[k] / den
                dr = vr[m] - vr[k]
                di = vi[m] - vi[k]
                ir[k] = yr * dr - yi * di
                ii[k] = yr * di + yi * dr
                # nr/ni: net current drawn out of the network at node k
                nr[k] += ir[k]
                ni[k] += ii[k]
                nr[m] -= ir[k]
                ni[m] -= ii[k]
            worst = 0.0
            for k in range(1, n):
                # consumed S = V * conj(I_drawn)
                sr = vr[k] * nr[k] + vi[k] * ni[k]
                si = vi[k] * nr[k] - vr[k] * ni[k]
                cr = cabs2(sr - p[k], si - q[k])
                if cr > worst:
                    worst = cr
            if worst <= tol:
                break
    return vr_a, vi_a, ir_a, ii_a, it, worst
