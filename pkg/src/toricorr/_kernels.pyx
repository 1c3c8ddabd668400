# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled hot kernels: Pauli-string application and expectation gathers.

Contracts mirror ``_kernels_py``.  The amplitude loops release the GIL and
parallelize with OpenMP; thread count follows OMP_NUM_THREADS unless
overridden via :func:`set_num_threads`.
"""

import numpy as np

cimport openmp
from cython.parallel cimport prange

cdef extern from *:
    """
    #include <stdint.h>
    static inline int tc_popcount64(uint64_t x) { return __builtin_popcountll(x); }
    """
    int tc_popcount64(unsigned long long x) nogil


def apply_terms_c(const double complex[::1] psi, double complex[::1] out,
                  const unsigned long long[::1] xs, const unsigned long long[::1] zs,
                  const double complex[::1] coefs):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t nt = xs.shape[0]
    cdef Py_ssize_t j, t
    cdef unsigned long long src
    cdef double complex acc
    for j in prange(dim, nogil=True, schedule='static'):
        acc = 0
        for t in range(nt):
            src = (<unsigned long long> j) ^ xs[t]
            if tc_popcount64(src & zs[t]) & 1:
                acc = acc - coefs[t] * psi[src]
            else:
                acc = acc + coefs[t] * psi[src]
        out[j] = acc


def apply_terms_r(const double[::1] psi, double[::1] out,
                  const unsigned long long[::1] xs, const unsigned long long[::1] zs,
                  const double[::1] coefs):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t nt = xs.shape[0]
    cdef Py_ssize_t j, t
    cdef unsigned long long src
    cdef double acc
    for j in prange(dim, nogil=True, schedule='static'):
        acc = 0
        for t in range(nt):
            src = (<unsigned long long> j) ^ xs[t]
            if tc_popcount64(src & zs[t]) & 1:
                acc = acc - coefs[t] * psi[src]
            else:
                acc = acc + coefs[t] * psi[src]
        out[j] = acc


def expect_terms_sv_c(const double complex[::1] psi,
                      const unsigned long long[::1] xs, const unsigned long long[::1] zs,
                      const double complex[::1] coefs):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t nt = xs.shape[0]
    out = np.empty(nt, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t j, t
    cdef unsigned long long src
    cdef double complex tot, v
    for t in prange(nt, nogil=True, schedule='static'):
        tot = 0
        for j in range(dim):
            src = (<unsigned long long> j) ^ xs[t]
            v = psi[src]
            v = v.real - 1j * v.imag
            if tc_popcount64((<unsigned long long> j) & zs[t]) & 1:
                tot = tot - v * psi[j]
            else:
                tot = tot + v * psi[j]
        ov[t] = coefs[t] * tot
    return out


def expect_terms_sv_r(const double[::1] psi,
                      const unsigned long long[::1] xs, const unsigned long long[::1] zs,
                      const double[::1] coefs):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t nt = xs.shape[0]
    out = np.empty(nt, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t j, t
    cdef unsigned long long src
    cdef double tot
    for t in prange(nt, nogil=True, schedule='static'):
        tot = 0
        for j in range(dim):
            src = (<unsigned long long> j) ^ xs[t]
            if tc_popcount64((<unsigned long long> j) & zs[t]) & 1:
                tot = tot - psi[src] * psi[j]
            else:
                tot = tot + psi[src] * psi[j]
        ov[t] = coefs[t] * tot
    return out


def expect_terms_dm(const double complex[:, ::1] rho,
                    const unsigned long long[::1] xs, const unsigned long long[::1] zs,
                    const double complex[::1] coefs):
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t nt = xs.shape[0]
    out = np.empty(nt, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t j, t
    cdef double complex tot
    for t in prange(nt, nogil=True, schedule='static'):
        tot = 0
        for j in range(dim):
            if tc_popcount64((<unsigned long long> j) & zs[t]) & 1:
                tot = tot - rho[(<unsigned long long> j) ^ xs[t], j]
            else:
                tot = tot + rho[(<unsigned long long> j) ^ xs[t], j]
        ov[t] = coefs[t] * tot
    return out


def set_num_threads(n: int) -> None:
    openmp.omp_set_num_threads(int(n))


def max_threads() -> int:
    return openmp.omp_get_max_threads()
