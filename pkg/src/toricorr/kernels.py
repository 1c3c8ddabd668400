"""Kernel dispatch: compiled extension when available, NumPy fallback otherwise.

Set ``TORICORR_PURE_PYTHON=1`` in the environment (before import) to force the
fallback; ``HAVE_EXT``/:func:`backend_name` report what is active.  All
entry points accept float64 or complex128 states and pick the real-arithmetic
fast path when both the state and the folded coefficients are real.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_PY = os.environ.get("TORICORR_PURE_PYTHON", "") not in ("", "0")

if _FORCE_PY:
    from . import _kernels_py as _impl

    HAVE_EXT = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        HAVE_EXT = True
    except ImportError:
        from . import _kernels_py as _impl

        HAVE_EXT = False


def backend_name() -> str:
    return "cython" if HAVE_EXT else "numpy"


def set_num_threads(n: int) -> None:
    _impl.set_num_threads(n)


def max_threads() -> int:
    return _impl.max_threads()


def _as_masks(xs, zs) -> tuple[np.ndarray, np.ndarray]:
    xs = np.ascontiguousarray(xs, dtype=np.uint64)
    zs = np.ascontiguousarray(zs, dtype=np.uint64)
    if xs.shape != zs.shape:
        raise ValueError("x/z mask arrays differ in length")
    return xs, zs


def apply_terms(psi: np.ndarray, xs, zs, coefs, out: np.ndarray | None = None) -> np.ndarray:
    """out = (sum_t coefs[t] * X(xs[t]) Z(zs[t])) @ psi, overwriting out."""
    xs, zs = _as_masks(xs, zs)
    coefs = np.asarray(coefs)
    psi = np.asarray(psi)
    real = (
        psi.dtype == np.float64
        and (coefs.dtype == np.float64 or np.all(coefs.imag == 0.0))
    )
    if real:
        psi = np.ascontiguousarray(psi, dtype=np.float64)
        cs = np.ascontiguousarray(coefs.real, dtype=np.float64)
        if out is None or out.dtype != np.float64:
            out = np.empty_like(psi)
        _impl.apply_terms_r(psi, out, xs, zs, cs)
    else:
        psi = np.ascontiguousarray(psi, dtype=np.complex128)
        cs = np.ascontiguousarray(coefs, dtype=np.complex128)
        if out is None or out.dtype != np.complex128:
            out = np.empty(psi.shape, dtype=np.complex128)
        _impl.apply_terms_c(psi, out, xs, zs, cs)
    return out


def expect_terms_sv(psi: np.ndarray, xs, zs, coefs) -> np.ndarray:
    """Per-term <psi| coefs[t] X(xs[t]) Z(zs[t]) |psi> as a complex array."""
    xs, zs = _as_masks(xs, zs)
    coefs = np.asarray(coefs)
    psi = np.asarray(psi)
    real = (
        psi.dtype == np.float64
        and (coefs.dtype == np.float64 or np.all(coefs.imag == 0.0))
    )
    if real:
        psi = np.ascontiguousarray(psi, dtype=np.float64)
        cs = np.ascontiguousarray(coefs.real, dtype=np.float64)
        return _impl.expect_terms_sv_r(psi, xs, zs, cs)
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    cs = np.ascontiguousarray(coefs, dtype=np.complex128)
    return _impl.expect_terms_sv_c(psi, xs, zs, cs)


def expect_terms_dm(rho: np.ndarray, xs, zs, coefs) -> np.ndarray:
    """Per-term Tr(coefs[t] X(xs[t]) Z(zs[t]) rho) as a complex array."""
    xs, zs = _as_masks(xs, zs)
    rho = np.ascontiguousarray(np.asarray(rho), dtype=np.complex128)
    cs = np.ascontiguousarray(coefs, dtype=np.complex128)
    return _impl.expect_terms_dm(rho, xs, zs, cs)
