# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled alternating-product kernel (see _kernels_py for the reference)."""

import numpy as np

from scipy.linalg.cython_blas cimport zgemv


cdef void _matvec(double complex[:, ::1] a, double complex* x, double complex* y, int n) noexcept nogil:
    # row-major a seen by BLAS as column-major a^T; 'T' gives a @ x
    cdef char trans = b'T'
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    cdef int inc = 1
    zgemv(&trans, &n, &n, &one, &a[0, 0], &n, x, &inc, &zero, y, &inc)


def alternate(double complex[::1] phi, double complex[:, ::1] w,
              double complex[:, ::1] w_adj, double complex[:, ::1] phases):
    """Apply the alternating product to ``phi`` in place and return it."""
    cdef int n = phi.shape[0]
    cdef int steps = phases.shape[0]
    cdef int m, i
    cdef double complex[::1] buf = np.empty(n, dtype=np.complex128)
    cdef double complex* x = &phi[0]
    cdef double complex* y = &buf[0]
    cdef double complex* tmp
    if w.shape[0] != n or w.shape[1] != n or w_adj.shape[0] != n or phases.shape[1] != n:
        raise ValueError("kernel operand shapes do not match")
    with nogil:
        for m in range(steps):
            _matvec(w, x, y, n)
            for i in range(n):
                y[i] = y[i] * phases[m, i]
            tmp = x; x = y; y = tmp
        for m in range(steps - 1, -1, -1):
            for i in range(n):
                x[i] = x[i] * phases[m, i]
            _matvec(w_adj, x, y, n)
            tmp = x; x = y; y = tmp
    # result sits in x after an even number of swaps
    if x != &phi[0]:
        for i in range(n):
            phi[i] = x[i]
    return np.asarray(phi)
