"""Reduced density matrices, von Neumann entropy, and marginal extraction.

Local qubit convention: a :class:`DensityMatrix` on m spins indexes its basis
with local qubit j as bit j (least significant first), and ``spin_labels[j]``
records which global spin local qubit j came from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import kernels
from .pauli import PauliString, enumerate_support_bounded

LOG2 = np.log(2.0)

#: eigenvalues in [-EIG_CLIP, 0) are treated as exact zeros; anything below
#: signals an invalid matrix rather than roundoff.
EIG_CLIP = 1e-9


class RdmError(ValueError):
    """Invalid reduction request or corrupted density matrix."""


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    spin_labels: tuple[int, ...]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        labels = tuple(int(s) for s in self.spin_labels)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise RdmError("density matrix must be square")
        if m.shape[0] != 1 << len(labels):
            raise RdmError(
                f"dimension {m.shape[0]} does not match {len(labels)} spin labels"
            )
        if len(set(labels)) != len(labels):
            raise RdmError("duplicate spin labels")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "spin_labels", labels)

    @property
    def n_spins(self) -> int:
        return len(self.spin_labels)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, eig_check: bool = True) -> None:
        """Trace 1 to 1e-10, Hermitian to 1e-12, eigenvalues >= -1e-9."""
        tr = complex(np.trace(self.matrix))
        if abs(tr - 1.0) > 1e-10:
            raise RdmError(f"trace is {tr}, not 1")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > 1e-12:
            raise RdmError("matrix is not Hermitian")
        if eig_check:
            lo = float(np.linalg.eigvalsh(self.matrix)[0])
            if lo < -EIG_CLIP:
                raise RdmError(f"matrix has eigenvalue {lo} < -{EIG_CLIP}")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


StateLike = Union[np.ndarray, DensityMatrix]


def _resolve_indices(region, n: int | None = None) -> tuple[int, ...]:
    """Accept a sequence of global spin indices (Regions are resolved by callers)."""
    idx = tuple(int(i) for i in region)
    if len(set(idx)) != len(idx):
        raise RdmError("repeated spin index in region")
    if n is not None and any(not 0 <= i < n for i in idx):
        raise RdmError(f"spin index out of range for {n} spins")
    return idx


def _infer_n(psi: np.ndarray) -> int:
    n = int(np.log2(psi.shape[0]) + 0.5)
    if 1 << n != psi.shape[0]:
        raise RdmError(f"state length {psi.shape[0]} is not a power of 2")
    return n


def reduce_state(psi: np.ndarray, region: Sequence[int],
                 max_spins: int = 12, allow_large: bool = False) -> DensityMatrix:
    """Partial trace of a pure state onto the given global spin indices.

    The output is guarded to ``max_spins`` kept spins (the dense matrix grows
    as 4**m); pass ``allow_large=True`` to override.
    """
    psi = np.asarray(psi)
    n = _infer_n(psi)
    keep = _resolve_indices(region, n)
    m = len(keep)
    if m > max_spins and not allow_large:
        raise RdmError(f"refusing {m}-spin reduction (guard {max_spins})")
    rest = [s for s in range(n) if s not in keep]
    # axis of spin s in psi.reshape([2]*n) is n-1-s (C order, MSB first)
    axes = [n - 1 - s for s in reversed(keep)] + [n - 1 - s for s in rest]
    a = psi.reshape([2] * n).transpose(axes).reshape(1 << m, 1 << (n - m))
    rho = a @ a.conj().T
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > 1e-8:
        rho = rho / tr
    return DensityMatrix(rho, keep)


def reduce_dm(rho: DensityMatrix, sub: Sequence[int]) -> DensityMatrix:
    """Partial trace of a density matrix onto a subset of its spin labels."""
    keep = _resolve_indices(sub)
    missing = [s for s in keep if s not in rho.spin_labels]
    if missing:
        raise RdmError(f"labels {missing} not present in density matrix")
    m = rho.n_spins
    pos = {s: j for j, s in enumerate(rho.spin_labels)}
    keep_local = [pos[s] for s in keep]
    rest_local = [j for j in range(m) if j not in keep_local]
    k, t = len(keep_local), len(rest_local)
    row_axes = [m - 1 - j for j in reversed(keep_local)] + [m - 1 - j for j in rest_local]
    col_axes = [m + a for a in row_axes]
    a = rho.matrix.reshape([2] * (2 * m)).transpose(row_axes + col_axes)
    a = a.reshape(1 << k, 1 << t, 1 << k, 1 << t)
    out = np.einsum("atbt->ab", a)
    return DensityMatrix(out, keep)


def permute_dm(rho: DensityMatrix, new_labels: Sequence[int]) -> DensityMatrix:
    """Reorder the tensor factors so that spin_labels == new_labels."""
    new = _resolve_indices(new_labels)
    if set(new) != set(rho.spin_labels):
        raise RdmError("new labels must be a permutation of the old ones")
    if new == rho.spin_labels:
        return rho
    m = rho.n_spins
    pos = {s: j for j, s in enumerate(rho.spin_labels)}
    idx = np.arange(rho.dim, dtype=np.uint64)
    src = np.zeros_like(idx)
    for j, s in enumerate(new):
        src |= ((idx >> np.uint64(j)) & np.uint64(1)) << np.uint64(pos[s])
    return DensityMatrix(rho.matrix[np.ix_(src, src)], new)


def entropy_bits(rho: StateLike) -> float:
    """Von Neumann entropy in bits, with eigenvalues in [-1e-9, 0) clipped to 0."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    vals = np.linalg.eigvalsh(mat)
    lo = float(vals[0])
    if lo < -EIG_CLIP:
        raise RdmError(f"eigenvalue {lo} below -{EIG_CLIP}; not a state")
    vals = np.clip(vals, 0.0, None)
    nz = vals[vals > 0.0]
    return float(-np.sum(nz * np.log(nz)) / LOG2)


def trace_distance(a: StateLike, b: StateLike) -> float:
    """(1/2) * trace norm of the difference."""
    ma = a.matrix if isinstance(a, DensityMatrix) else np.asarray(a)
    mb = b.matrix if isinstance(b, DensityMatrix) else np.asarray(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(ma - mb))))


def trace_norm(x: np.ndarray) -> float:
    x = np.asarray(x)
    return float(np.sum(np.abs(np.linalg.eigvalsh(x))))


def to_local(rho: DensityMatrix) -> DensityMatrix:
    """Same matrix with labels relabelled to 0..m-1 (solver-local form)."""
    return DensityMatrix(rho.matrix, tuple(range(rho.n_spins)))


def marginal_targets(source: StateLike, region: Sequence[int], r: int
                     ) -> list[tuple[PauliString, float]]:
    """(string, expectation) pairs over the canonical weight-<=r enumeration.

    Strings act on the local qubits of the region (position in ``region`` =
    local spin); expectations are taken in the reduced state of the region.
    """
    if isinstance(source, DensityMatrix):
        keep = _resolve_indices(region)
        rho = source if keep == source.spin_labels else reduce_dm(source, keep)
    else:
        rho = reduce_state(np.asarray(source), region)
    m = rho.n_spins
    strings = enumerate_support_bounded(m, r)
    xs = np.array([p.x_bits for p in strings], dtype=np.uint64)
    zs = np.array([p.z_bits for p in strings], dtype=np.uint64)
    coefs = np.array([p.phase for p in strings], dtype=complex)
    vals = kernels.expect_terms_dm(rho.matrix, xs, zs, coefs)
    if np.max(np.abs(vals.imag)) > 1e-9:
        raise RdmError("non-real Pauli expectation; invalid state?")
    return list(zip(strings, vals.real.tolist()))


# --- density-matrix file format ----------------------------------------------
# one JSON header line (spin_labels, dim), then row-major little-endian
# complex128 payload

def save_dm(path: str, rho: DensityMatrix) -> None:
    header = json.dumps({"spin_labels": list(rho.spin_labels), "dim": rho.dim})
    payload = np.ascontiguousarray(rho.matrix, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        fh.write(payload.tobytes())


def load_dm(path: str) -> DensityMatrix:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        dim = int(header["dim"])
        labels = tuple(int(s) for s in header["spin_labels"])
        payload = fh.read()
    mat = np.frombuffer(payload, dtype="<c16").reshape(dim, dim).astype(complex)
    return DensityMatrix(mat, labels)
