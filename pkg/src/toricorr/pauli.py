"""Pauli-string algebra on bit sets, with matrix-free application to states.

A string is stored as ``phase * X(x_bits) * Z(z_bits)`` where ``x_bits`` and
``z_bits`` are bitmasks over spins (spin k = bit k) and the Z factor acts
first.  A spin present in both masks carries the composition ``X.Z``; the
Hermitian letter Y is ``i * X.Z``, so canonical letter strings carry phase
``i**(#Y)``.  On a computational basis state this gives

    P |i> = phase * (-1)**popcount(i & z_bits) |i ^ x_bits>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)  # i**k for k = 0..3


class PauliError(ValueError):
    """Invalid Pauli-string construction or use."""


def _normalize_phase(phase: complex) -> complex:
    for p in _PHASES:
        if abs(phase - p) < 1e-12:
            return p
    raise PauliError(f"phase must be a power of i, got {phase!r}")


@dataclass(frozen=True)
class PauliString:
    n: int
    x_bits: int
    z_bits: int
    phase: complex = 1 + 0j

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PauliError("need at least one spin")
        mask = (1 << self.n) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise PauliError("bit set extends beyond spin count")
        object.__setattr__(self, "phase", _normalize_phase(self.phase))

    # -- structure ---------------------------------------------------------

    @property
    def support_bits(self) -> int:
        return self.x_bits | self.z_bits

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.n) if (self.support_bits >> k) & 1)

    @property
    def weight(self) -> int:
        return int(self.support_bits).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    @property
    def is_hermitian(self) -> bool:
        k = int(self.x_bits & self.z_bits).bit_count()
        return self.phase.conjugate() * (-1) ** k == self.phase

    def dagger(self) -> "PauliString":
        k = int(self.x_bits & self.z_bits).bit_count()
        return PauliString(self.n, self.x_bits, self.z_bits,
                           self.phase.conjugate() * (-1) ** k)

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise PauliError("spin counts differ")
        k = int(self.x_bits & other.z_bits).bit_count()
        k += int(self.z_bits & other.x_bits).bit_count()
        return k % 2 == 0

    # -- text form ---------------------------------------------------------

    def to_text(self) -> str:
        if self.is_identity:
            body = "I"
        else:
            letters = []
            for k in self.support:
                x = (self.x_bits >> k) & 1
                z = (self.z_bits >> k) & 1
                letters.append(("X" if not z else "Y" if x else "Z") + str(k))
            body = " ".join(letters)
        rel = self.phase / _canonical_phase(self.x_bits, self.z_bits)
        prefix = {1 + 0j: "", -1 + 0j: "-", 1j: "i ", -1j: "-i "}[_normalize_phase(rel)]
        return prefix + body

    def __repr__(self) -> str:
        return f"<{self.to_text()} on {self.n}>"

    # -- algebra -----------------------------------------------------------

    def __matmul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; guarded to 12 spins (column-sparse construction)."""
        if self.n > 12:
            raise PauliError("dense matrix limited to 12 spins")
        dim = 1 << self.n
        idx = np.arange(dim, dtype=np.uint64)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(self.z_bits)) & 1)
        m = np.zeros((dim, dim), dtype=complex)
        m[idx ^ np.uint64(self.x_bits), idx] = self.phase * signs
        return m


def _canonical_phase(x_bits: int, z_bits: int) -> complex:
    return _PHASES[int(x_bits & z_bits).bit_count() % 4]


# -- constructors ------------------------------------------------------------

def identity(n: int) -> PauliString:
    return PauliString(n, 0, 0)


def from_sites(n: int, x_sites: Iterable[int] = (), z_sites: Iterable[int] = (),
               hermitian: bool = True) -> PauliString:
    """Build from site lists; ``hermitian`` fixes the canonical i**(#Y) phase."""
    x_bits = 0
    for k in x_sites:
        if not 0 <= k < n:
            raise PauliError(f"site {k} out of range")
        if (x_bits >> k) & 1:
            raise PauliError(f"site {k} repeated")
        x_bits |= 1 << k
    z_bits = 0
    for k in z_sites:
        if not 0 <= k < n:
            raise PauliError(f"site {k} out of range")
        if (z_bits >> k) & 1:
            raise PauliError(f"site {k} repeated")
        z_bits |= 1 << k
    phase = _canonical_phase(x_bits, z_bits) if hermitian else 1 + 0j
    return PauliString(n, x_bits, z_bits, phase)


def x_string(n: int, sites: Iterable[int]) -> PauliString:
    return from_sites(n, x_sites=sites)


def z_string(n: int, sites: Iterable[int]) -> PauliString:
    return from_sites(n, z_sites=sites)


def single(n: int, site: int, kind: str) -> PauliString:
    kind = kind.upper()
    if kind == "X":
        return from_sites(n, x_sites=[site])
    if kind == "Y":
        return from_sites(n, x_sites=[site], z_sites=[site])
    if kind == "Z":
        return from_sites(n, z_sites=[site])
    raise PauliError(f"kind must be X, Y or Z, got {kind!r}")


def from_text(n: int, text: str) -> PauliString:
    """Parse e.g. ``"X0 X3 Z7"``, ``"-Y2"``, ``"i X0 Z0"``, ``"I"``."""
    toks = text.replace("*", " ").split()
    phase = 1 + 0j
    if toks and toks[0] in ("+", "-", "i", "-i", "+i"):
        phase = {"+": 1, "-": -1, "i": 1j, "+i": 1j, "-i": -1j}[toks[0]]
        toks = toks[1:]
    x_bits = z_bits = 0
    seen = set()
    for tok in toks:
        if tok == "I":
            continue
        letter, rest = tok[0].upper(), tok[1:]
        try:
            site = int(rest)
        except ValueError as exc:
            raise PauliError(f"bad Pauli token {tok!r}") from exc
        if letter not in "XYZ" or not 0 <= site < n:
            raise PauliError(f"bad Pauli token {tok!r}")
        if site in seen:
            raise PauliError(f"site {site} repeated")
        seen.add(site)
        if letter in "XY":
            x_bits |= 1 << site
        if letter in "ZY":
            z_bits |= 1 << site
    return PauliString(n, x_bits, z_bits, phase * _canonical_phase(x_bits, z_bits))


# -- products and application -------------------------------------------------

def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Product a*b with exact phase tracking (Z factors commute past X's)."""
    if a.n != b.n:
        raise PauliError("spin counts differ")
    sign = -1 if int(a.z_bits & b.x_bits).bit_count() % 2 else 1
    return PauliString(a.n, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits,
                       a.phase * b.phase * sign)


def apply_pauli(psi: np.ndarray, p: PauliString, out: np.ndarray | None = None) -> np.ndarray:
    """Matrix-free |out> = P |psi>; preserves the norm."""
    if psi.shape != (1 << p.n,):
        raise PauliError(f"state has dimension {psi.shape}, expected {1 << p.n}")
    return kernels.apply_terms(
        psi,
        np.array([p.x_bits], dtype=np.uint64),
        np.array([p.z_bits], dtype=np.uint64),
        np.array([p.phase], dtype=complex),
        out=out,
    )


def expectation(state, p: PauliString) -> float:
    """<P> for a state vector (1-D array) or a density matrix.

    Density matrices may be plain 2-D arrays or any object with a ``matrix``
    attribute; the string acts on the local qubits of the matrix.
    """
    if not p.is_hermitian:
        raise PauliError(f"expectation of non-Hermitian string {p!r}")
    mat = getattr(state, "matrix", state)
    mat = np.asarray(mat)
    xs = np.array([p.x_bits], dtype=np.uint64)
    zs = np.array([p.z_bits], dtype=np.uint64)
    coefs = np.array([p.phase], dtype=complex)
    if mat.ndim == 1:
        if mat.shape != (1 << p.n,):
            raise PauliError("state dimension mismatch")
        val = kernels.expect_terms_sv(mat, xs, zs, coefs)[0]
    elif mat.ndim == 2:
        if mat.shape != (1 << p.n, 1 << p.n):
            raise PauliError("density-matrix dimension mismatch")
        val = kernels.expect_terms_dm(mat, xs, zs, coefs)[0]
    else:
        raise PauliError("state must be a vector or a square matrix")
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise PauliError(f"expectation not real ({val}); invalid state?")
    return float(val.real)


# -- constraint-operator enumeration ------------------------------------------

def enumerate_support_bounded(region_size, r: int) -> list[PauliString]:
    """All non-identity strings of weight <= r supported on the first m spins.

    ``region_size`` is an int m or anything with ``len``.  Strings act on m
    local spins (position in the region = local spin index) and come in
    canonical order: by weight, then lexicographically by (x_bits, z_bits).
    The count is sum_{k=1..r} C(m,k) * 3**k.
    """
    m = region_size if isinstance(region_size, int) else len(region_size)
    if not 1 <= r <= m:
        raise PauliError(f"order r={r} out of range for {m} spins")
    out = []
    for k in range(1, r + 1):
        for sites in combinations(range(m), k):
            for letters in product("XYZ", repeat=k):
                x_bits = z_bits = 0
                for site, letter in zip(sites, letters):
                    if letter in "XY":
                        x_bits |= 1 << site
                    if letter in "ZY":
                        z_bits |= 1 << site
                out.append(PauliString(m, x_bits, z_bits,
                                       _canonical_phase(x_bits, z_bits)))
    out.sort(key=lambda p: (p.weight, p.x_bits, p.z_bits))
    return out


def count_support_bounded(m: int, r: int) -> int:
    return sum(math.comb(m, k) * 3 ** k for k in range(1, r + 1))


# -- weighted sums -------------------------------------------------------------

@dataclass(frozen=True)
class WeightedPauliSum:
    """Hermitian sum of real-weighted Hermitian Pauli strings."""

    n: int
    terms: tuple[tuple[float, PauliString], ...]

    def __init__(self, n: int, terms: Iterable[tuple[float, PauliString]]):
        terms = tuple((float(c), p) for c, p in terms)
        for c, p in terms:
            if p.n != n:
                raise PauliError("term acts on wrong spin count")
            if not p.is_hermitian:
                raise PauliError(f"non-Hermitian term {p!r} in operator sum")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def kernel_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x masks, z masks, complex coefficients with phases folded in)."""
        xs = np.array([p.x_bits for _, p in self.terms], dtype=np.uint64)
        zs = np.array([p.z_bits for _, p in self.terms], dtype=np.uint64)
        coefs = np.array([c * p.phase for c, p in self.terms], dtype=complex)
        return xs, zs, coefs

    @property
    def is_real(self) -> bool:
        """True when every folded coefficient is real (no Y content)."""
        _, _, coefs = self.kernel_arrays()
        return bool(np.all(coefs.imag == 0.0))

    def apply(self, psi: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        xs, zs, coefs = self.kernel_arrays()
        return kernels.apply_terms(psi, xs, zs, coefs, out=out)

    def to_matrix(self) -> np.ndarray:
        if self.n > 12:
            raise PauliError("dense matrix limited to 12 spins")
        dim = 1 << self.n
        idx = np.arange(dim, dtype=np.uint64)
        xs, zs, coefs = self.kernel_arrays()
        real = bool(np.all(coefs.imag == 0.0))
        m = np.zeros((dim, dim), dtype=np.float64 if real else complex)
        cs = coefs.real if real else coefs
        for x, z, c in zip(xs, zs, cs):
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
            np.add.at(m, (idx ^ x, idx), c * signs)
        return m
