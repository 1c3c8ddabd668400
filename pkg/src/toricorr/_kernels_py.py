"""Pure NumPy implementations of the hot kernels.

Same contracts as the compiled module ``_kernels``; selected automatically by
:mod:`toricorr.kernels` when the extension is unavailable or disabled.  All
loops are vectorized over the amplitude index, so memory traffic is a few
temporaries of the state size per term.
"""

from __future__ import annotations

import numpy as np

_ONE = np.uint64(1)


def _indices(dim: int) -> np.ndarray:
    return np.arange(dim, dtype=np.uint64)


def _signs(src: np.ndarray, z: np.uint64) -> np.ndarray:
    # (-1)**popcount(src & z), as float64 in {+1.0, -1.0}
    return 1.0 - 2.0 * (np.bitwise_count(src & z) & _ONE).astype(np.float64)


def apply_terms_c(psi: np.ndarray, out: np.ndarray, xs: np.ndarray,
                  zs: np.ndarray, coefs: np.ndarray) -> None:
    idx = _indices(psi.shape[0])
    out[:] = 0
    for x, z, c in zip(xs, zs, coefs):
        src = idx ^ x
        out += (c * _signs(src, z)) * psi[src]


def apply_terms_r(psi: np.ndarray, out: np.ndarray, xs: np.ndarray,
                  zs: np.ndarray, coefs: np.ndarray) -> None:
    idx = _indices(psi.shape[0])
    out[:] = 0
    for x, z, c in zip(xs, zs, coefs):
        src = idx ^ x
        out += (c * _signs(src, z)) * psi[src]


def expect_terms_sv_c(psi: np.ndarray, xs: np.ndarray, zs: np.ndarray,
                      coefs: np.ndarray) -> np.ndarray:
    idx = _indices(psi.shape[0])
    out = np.empty(len(xs), dtype=complex)
    for t, (x, z, c) in enumerate(zip(xs, zs, coefs)):
        src = idx ^ x
        out[t] = c * np.vdot(psi[src] * _signs(idx, z), psi)
    return out


def expect_terms_sv_r(psi: np.ndarray, xs: np.ndarray, zs: np.ndarray,
                      coefs: np.ndarray) -> np.ndarray:
    return expect_terms_sv_c(psi, xs, zs, coefs.astype(complex))


def expect_terms_dm(rho: np.ndarray, xs: np.ndarray, zs: np.ndarray,
                    coefs: np.ndarray) -> np.ndarray:
    idx = _indices(rho.shape[0])
    out = np.empty(len(xs), dtype=complex)
    for t, (x, z, c) in enumerate(zip(xs, zs, coefs)):
        out[t] = c * np.sum(_signs(idx, z) * rho[idx ^ x, idx])
    return out


def set_num_threads(n: int) -> None:
    """No-op: the NumPy path has no thread pool of its own."""


def max_threads() -> int:
    return 1
