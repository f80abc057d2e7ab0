# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Numerov recurrence."""

from libc.math cimport fabs


def numerov(double[::1] f, double[::1] psi, double h2, double limit):
    """Advance ``psi'' = f psi`` in place from ``psi[0], psi[1]``.

    Whenever ``|psi|`` exceeds ``limit`` the computed prefix is divided by
    that value. Returns the number of rescalings.
    """
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t i, j
    cdef double a_prev, a_cur, a_next, scale
    cdef int rescaled = 0
    if psi.shape[0] != n:
        raise ValueError("f and psi must have the same length")
    if n < 3:
        return 0
    with nogil:
        a_prev = 1.0 - h2 * f[0] / 12.0
        a_cur = 1.0 - h2 * f[1] / 12.0
        for i in range(1, n - 1):
            a_next = 1.0 - h2 * f[i + 1] / 12.0
            psi[i + 1] = ((12.0 - 10.0 * a_cur) * psi[i] - a_prev * psi[i - 1]) / a_next
            if fabs(psi[i + 1]) > limit:
                scale = 1.0 / fabs(psi[i + 1])
                for j in range(i + 2):
                    psi[j] *= scale
                rescaled += 1
            a_prev = a_cur
            a_cur = a_next
    return rescaled
