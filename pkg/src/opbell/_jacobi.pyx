# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cyclic Jacobi eigensolver for small dense symmetric matrices.

Mirrors :mod:`opbell._jacobi_py` operation for operation.
"""
import numpy as np

from libc.math cimport fabs, sqrt


def jacobi_eigh(const double[:, ::1] a_in, double rel_tol=1e-14, int max_sweeps=100):
    """Return ``(eigenvalues, eigenvectors, sweeps, converged)``, unsorted."""
    cdef Py_ssize_t n = a_in.shape[0]
    cdef Py_ssize_t p, q, k
    cdef double app, aqq, apq, theta, t, c, s, g, akp, akq, vkp, vkq
    cdef double off, norm_f = 0.0
    cdef int sweep = 0
    cdef bint converged = False

    a_arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr

    for p in range(n):
        for q in range(n):
            norm_f += a[p, q] * a[p, q]
    norm_f = sqrt(norm_f)

    while True:
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        off = sqrt(off)
        if off <= rel_tol * norm_f:
            converged = True
            break
        if sweep >= max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                g = 100.0 * fabs(apq)
                if sweep > 3 and fabs(app) + g == fabs(app) and fabs(aqq) + g == fabs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[p, k] = a[k, p]
                    a[k, q] = s * akp + c * akq
                    a[q, k] = a[k, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweep += 1

    w_arr = np.empty(n, dtype=np.float64)
    for p in range(n):
        w_arr[p] = a[p, p]
    return w_arr, v_arr, sweep, converged
