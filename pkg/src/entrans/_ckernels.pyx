# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled matrix-free kernel for sums of signed bit-flip terms."""

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def apply_terms(const double[:, ::1] psi,
                const double[::1] diag,
                const long long[::1] masks,
                const long long[::1] smasks,
                const double[::1] coefs,
                double[:, ::1] out):
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t nterms = masks.shape[0]
    cdef Py_ssize_t b, k, src
    cdef double re, im, c
    with nogil:
        for b in range(n):
            re = diag[b] * psi[b, 0]
            im = diag[b] * psi[b, 1]
            for k in range(nterms):
                src = b ^ masks[k]
                c = coefs[k]
                if __builtin_popcountll(<unsigned long long>(b & smasks[k])) & 1:
                    c = -c
                re = re + c * psi[src, 0]
                im = im + c * psi[src, 1]
            out[b, 0] = re
            out[b, 1] = im
