# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inverse-CDF counting kernel for multinomial sampling.

Replicates numpy.searchsorted(cdf, u, side="right") exactly: for each
uniform variate the outcome index is the first CDF entry strictly above it,
so the NumPy fallback and this kernel produce identical counts from
identical variates.
"""


def counts_from_uniforms(const double[::1] cdf, const double[::1] uniforms,
                         long long[::1] out):
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef Py_ssize_t size = cdf.shape[0]
    cdef Py_ssize_t i, lo, hi, mid
    cdef double u
    if out.shape[0] != size:
        raise ValueError("output buffer must match the CDF length")
    with nogil:
        for i in range(n):
            u = uniforms[i]
            lo = 0
            hi = size
            while lo < hi:
                mid = (lo + hi) >> 1
                if cdf[mid] <= u:
                    lo = mid + 1
                else:
                    hi = mid
            out[lo] += 1
