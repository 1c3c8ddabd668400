"""Toric-code-plus-field Hamiltonians and their low-lying spectra.

Stabilizer couplings are fixed at 1, so the field magnitude ``h`` is measured
in units of the star/plaquette coupling.  Dense diagonalization is used up to
``dense_cutoff`` spins; above that a matrix-free Lanczos (ARPACK, full
orthogonalization, seeded start vector) runs on the compiled kernels.  When
the field has no y component every coefficient is real and the solver runs in
real arithmetic at half the memory.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from . import kernels
from .lattice import LatticeSpec, edge_index, logical_supports, plaquette_support, star_support
from .pauli import PauliString, WeightedPauliSum, from_sites, x_string, z_string
from .rdm import DensityMatrix

COEFF_FLOOR = 1e-15  # field terms below this are omitted from the sum


class SpectraError(ValueError):
    """Invalid solve request (size guards, malformed field)."""


class NonConvergenceError(RuntimeError):
    """Eigensolver failed to reach the requested residual."""


@dataclass(frozen=True)
class FieldSpec:
    h: float
    n_dir: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self) -> None:
        if self.h < 0:
            raise SpectraError("field magnitude must be >= 0")
        d = np.asarray(self.n_dir, dtype=float)
        if d.shape != (3,) or abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise SpectraError(f"field direction must be a unit 3-vector, got {self.n_dir}")
        object.__setattr__(self, "n_dir", (float(d[0]), float(d[1]), float(d[2])))

    @staticmethod
    def along(axis: str, h: float) -> "FieldSpec":
        vec = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}[axis]
        return FieldSpec(h, vec)


@dataclass
class SolverOptions:
    tol: float = 1e-10            # required residual |H v - E0 v|
    lanczos_tol: float = 0.0      # ARPACK relative tolerance (0 = machine precision)
    max_iter: int | None = None
    ncv: int | None = None
    dense_cutoff: int = 14
    seed: int = 42
    degeneracy_threshold: float = 1e-8
    max_spins: int = 26
    allow_large: bool = False
    force_complex: bool = False


@dataclass
class GroundStateResult:
    energy0: float
    gap: float
    vector: np.ndarray
    residual: float
    near_degenerate: bool
    method: str


def stabilizer_strings(spec: LatticeSpec) -> tuple[list[PauliString], list[PauliString]]:
    """All star (X-type) and plaquette (Z-type) operators of the lattice."""
    n = spec.n_spins
    stars = [
        x_string(n, [edge_index(spec, e) for e in star_support(spec, v)])
        for v in spec.vertices()
    ]
    plaqs = [
        z_string(n, [edge_index(spec, e) for e in plaquette_support(spec, f)])
        for f in spec.faces()
    ]
    return stars, plaqs


def build_hamiltonian(spec: LatticeSpec, field: FieldSpec) -> WeightedPauliSum:
    """H = -sum_s A_s - sum_p B_p - h * sum_i n . sigma_i."""
    n = spec.n_spins
    stars, plaqs = stabilizer_strings(spec)
    terms: list[tuple[float, PauliString]] = [(-1.0, s) for s in stars]
    terms += [(-1.0, p) for p in plaqs]
    nx, ny, nz = field.n_dir
    for i in range(n):
        for comp, kind in ((nx, "X"), (ny, "Y"), (nz, "Z")):
            c = -field.h * comp
            if abs(c) >= COEFF_FLOOR:
                if kind == "X":
                    p = from_sites(n, x_sites=[i])
                elif kind == "Y":
                    p = from_sites(n, x_sites=[i], z_sites=[i])
                else:
                    p = from_sites(n, z_sites=[i])
                terms.append((c, p))
    return WeightedPauliSum(n, terms)


def _dense_matrix(ham: WeightedPauliSum) -> np.ndarray:
    dim = 1 << ham.n
    idx = np.arange(dim, dtype=np.uint64)
    xs, zs, coefs = ham.kernel_arrays()
    real = bool(np.all(coefs.imag == 0.0))
    m = np.zeros((dim, dim), dtype=np.float64 if real else complex)
    cs = coefs.real if real else coefs
    for x, z, c in zip(xs, zs, cs):
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
        np.add.at(m, (idx ^ x, idx), c * signs)
    return m


def _check_size(n_spins: int, opts: SolverOptions) -> None:
    if n_spins > opts.max_spins and not opts.allow_large:
        raise SpectraError(
            f"{n_spins} spins exceeds the {opts.max_spins}-spin memory guard"
        )


def _start_vector(dim: int, real: bool, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    if not real:
        v0 = v0 + 1j * rng.standard_normal(dim)
    return v0 / np.linalg.norm(v0)


def _lanczos(ham: WeightedPauliSum, k: int, opts: SolverOptions,
             want_vector: bool = True):
    dim = 1 << ham.n
    xs, zs, coefs = ham.kernel_arrays()
    real = ham.is_real and not opts.force_complex
    dtype = np.float64 if real else np.complex128
    cs = coefs.real if real else coefs
    buf = np.empty(dim, dtype=dtype)

    def matvec(v):
        return kernels.apply_terms(np.ascontiguousarray(v.ravel(), dtype=dtype),
                                   xs, zs, cs, out=buf)

    op = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=matvec, dtype=dtype)
    v0 = _start_vector(dim, real, opts.seed)
    try:
        vals, vecs = scipy.sparse.linalg.eigsh(
            op, k=k, which="SA", v0=v0, tol=opts.lanczos_tol,
            maxiter=opts.max_iter, ncv=opts.ncv,
            return_eigenvectors=True,
        )
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise NonConvergenceError(f"Lanczos did not converge: {exc}") from exc
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    return vals, (vecs if want_vector else None)


def ground_state(ham: WeightedPauliSum, n_spins: int | None = None,
                 opts: SolverOptions | None = None) -> GroundStateResult:
    """Lowest eigenpair plus the gap to the next Ritz value."""
    opts = opts or SolverOptions()
    n = ham.n if n_spins is None else n_spins
    if n != ham.n:
        raise SpectraError("n_spins disagrees with the operator")
    _check_size(n, opts)
    dim = 1 << n
    if n <= opts.dense_cutoff:
        m = _dense_matrix(ham)
        vals, vecs = scipy.linalg.eigh(m, subset_by_index=(0, min(1, dim - 1)))
        e0 = float(vals[0])
        gap = float(vals[1] - vals[0]) if len(vals) > 1 else np.inf
        vec = np.ascontiguousarray(vecs[:, 0])
        method = "dense"
    else:
        vals, vecs = _lanczos(ham, k=2, opts=opts)
        e0 = float(vals[0])
        gap = float(vals[1] - vals[0])
        vec = np.ascontiguousarray(vecs[:, 0])
        method = "lanczos"
    hv = ham.apply(vec)
    residual = float(np.linalg.norm(hv - e0 * vec))
    if residual > opts.tol:
        raise NonConvergenceError(
            f"ground-state residual {residual:.3e} exceeds tol {opts.tol:.3e}"
        )
    return GroundStateResult(
        energy0=e0,
        gap=gap,
        vector=vec / np.linalg.norm(vec),
        residual=residual,
        near_degenerate=bool(gap < opts.degeneracy_threshold),
        method=method,
    )


def low_spectrum(ham: WeightedPauliSum, n_spins: int | None = None, k: int = 4,
                 opts: SolverOptions | None = None) -> np.ndarray:
    """The k lowest eigenvalues, ascending; k is capped at 16."""
    opts = opts or SolverOptions()
    n = ham.n if n_spins is None else n_spins
    if not 1 <= k <= 16:
        raise SpectraError("k must be between 1 and 16")
    _check_size(n, opts)
    dim = 1 << n
    k = min(k, dim)
    if n <= opts.dense_cutoff:
        m = _dense_matrix(ham)
        vals = scipy.linalg.eigh(m, eigvals_only=True, subset_by_index=(0, k - 1))
        return np.asarray(vals, dtype=float)
    vals, _ = _lanczos(ham, k=k, opts=opts, want_vector=False)
    return np.asarray(vals[:k], dtype=float)


# --- analytic h = 0 states ----------------------------------------------------

def code_basis_states(spec: LatticeSpec, opts: SolverOptions | None = None
                      ) -> list[np.ndarray]:
    """The four orthonormal stabilizer ground states |G_ab> at zero field.

    |G_ab> is the star-projected X-logical translate of |0...0>: all star and
    plaquette expectations are +1, and (a, b) select the Z-logical sector.
    Amplitudes are real (float64).
    """
    opts = opts or SolverOptions()
    n = spec.n_spins
    _check_size(n, opts)
    dim = 1 << n
    stars, _ = stabilizer_strings(spec)
    star_arrays = [s.x_bits for s in stars]
    logs = logical_supports(spec)
    lx1 = x_string(n, [edge_index(spec, e) for e in logs.x_loop_h])
    lx2 = x_string(n, [edge_index(spec, e) for e in logs.x_loop_v])
    states = []
    for a in (0, 1):
        for b in (0, 1):
            v = np.zeros(dim, dtype=np.float64)
            start = 0
            if a:
                start ^= lx1.x_bits
            if b:
                start ^= lx2.x_bits
            v[start] = 1.0
            tmp = np.empty_like(v)
            for xbits in star_arrays:
                # v <- (1 + A_s) v / 2
                kernels.apply_terms(
                    v,
                    np.array([0, xbits], dtype=np.uint64),
                    np.array([0, 0], dtype=np.uint64),
                    np.array([0.5, 0.5]),
                    out=tmp,
                )
                v, tmp = tmp, v
            v /= np.linalg.norm(v)
            states.append(v)
    return states


def code_mixed_state(spec: LatticeSpec, opts: SolverOptions | None = None) -> DensityMatrix:
    """Equal mixture of the four code basis states (dense; <= 14 spins)."""
    opts = opts or SolverOptions()
    n = spec.n_spins
    if n > 14 and not opts.allow_large:
        raise SpectraError(f"mixed code state is dense 2^{n}; guard is 14 spins")
    psi = np.column_stack(code_basis_states(spec, opts))
    rho = (psi @ psi.T) / 4.0
    return DensityMatrix(rho, tuple(range(n)))


# --- state cache file ----------------------------------------------------------
# magic "TCST", then <u32 version, u32 n_spins, u32 flags> little-endian,
# then 2^n float64 amplitudes (flags bit0 clear) or 2^n complex128 (bit0 set),
# basis order: spin 0 is the least significant bit of the amplitude index.

_MAGIC = b"TCST"
_VERSION = 1


class StateFileError(IOError):
    pass


def save_state(path: str, psi: np.ndarray) -> None:
    psi = np.asarray(psi)
    n = int(np.log2(psi.shape[0]) + 0.5)
    if 1 << n != psi.shape[0]:
        raise StateFileError("state length is not a power of 2")
    is_complex = np.iscomplexobj(psi)
    flags = 1 if is_complex else 0
    payload = np.ascontiguousarray(psi, dtype="<c16" if is_complex else "<f8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", _VERSION, n, flags))
        fh.write(payload.tobytes())


def load_state(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise StateFileError(f"bad magic {magic!r}; not a state cache file")
        version, n, flags = struct.unpack("<III", fh.read(12))
        if version != _VERSION:
            raise StateFileError(f"unsupported version {version}")
        payload = fh.read()
    dtype = "<c16" if flags & 1 else "<f8"
    psi = np.frombuffer(payload, dtype=dtype)
    if psi.shape[0] != 1 << n:
        raise StateFileError("payload length disagrees with header")
    return psi.astype(np.complex128 if flags & 1 else np.float64)
