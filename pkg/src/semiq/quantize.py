"""Operators on truncated bosonic Fock spaces and spin representations.

Classical polynomials in (z, z*) are mapped to matrices by replacing z with
the Bose annihilation operator.  Monomials mixing z and z* need an ordering
choice; the default is Weyl (symmetric) ordering, averaging over every
interleaving of the factors.  Normal ordering (all creation operators to the
left) is available so model Hamiltonians can be written in their familiar
normal-ordered form; on any fixed monomial the two choices differ only by
identity shifts of lower-degree quantizations.

Truncation caveat: the top rungs of a truncated ladder cannot satisfy
[a, a+] = 1, so operator identities are only meaningful on the "safe
subspace" of levels whose images under every involved operator stay below
the cut.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

import numpy as np

__all__ = [
    "FockSpace",
    "SpinRep",
    "OperatorMatrix",
    "annihilation",
    "creation",
    "number",
    "weyl_quantize",
    "normal_quantize",
    "quantize",
    "schwinger_spin",
    "spin_operators",
    "symmetrize_product",
    "commutator",
    "tensor_embed",
    "export_operator_csv",
]

MAX_QUANTIZE_DEGREE = 8


@dataclass(frozen=True)
class FockSpace:
    """Truncated multi-mode Fock space; mode a keeps levels 0..mode_dims[a]-1."""

    mode_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.mode_dims)
        if not dims:
            raise ValueError("FockSpace needs at least one mode")
        if any(d < 2 for d in dims):
            raise ValueError("every Fock truncation must be at least 2")
        object.__setattr__(self, "mode_dims", dims)

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def total_dim(self) -> int:
        out = 1
        for d in self.mode_dims:
            out *= d
        return out

    def occupation(self, index: int) -> tuple[int, ...]:
        """Occupation numbers of the flat basis index (mode 0 slowest)."""
        occ = []
        for d in reversed(self.mode_dims):
            occ.append(index % d)
            index //= d
        return tuple(reversed(occ))

    def index(self, occupation) -> int:
        index = 0
        for n, d in zip(occupation, self.mode_dims):
            if not 0 <= n < d:
                raise ValueError(f"occupation {occupation} outside truncation {self.mode_dims}")
            index = index * d + n
        return index


@dataclass(frozen=True)
class SpinRep:
    """Spin-l representation, dimension 2l + 1; l may be half-integral."""

    l: float

    def __post_init__(self):
        two_l = 2 * self.l
        if two_l < 0 or abs(two_l - round(two_l)) > 1e-12:
            raise ValueError(f"2l must be a non-negative integer, got l={self.l}")
        object.__setattr__(self, "l", float(self.l))

    @property
    def dim(self) -> int:
        return int(round(2 * self.l)) + 1


class OperatorMatrix:
    """Dense complex matrix on a labeled finite basis."""

    __slots__ = ("mat", "basis")

    def __init__(self, mat, basis: FockSpace | SpinRep | None = None):
        mat = np.asarray(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator matrix must be square")
        if not np.all(np.isfinite(mat)):
            raise ValueError("operator entries must be finite")
        if isinstance(basis, FockSpace) and basis.total_dim != mat.shape[0]:
            raise ValueError("matrix dimension does not match Fock space")
        if isinstance(basis, SpinRep) and basis.dim != mat.shape[0]:
            raise ValueError("matrix dimension does not match spin representation")
        self.mat = mat
        self.basis = basis

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.mat.conj().T, self.basis)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def _merge_basis(self, other: "OperatorMatrix"):
        if self.dim != other.dim:
            raise ValueError(f"operator dimension mismatch: {self.dim} vs {other.dim}")
        return self.basis if self.basis == other.basis else None

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.mat + other.mat, self._merge_basis(other))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.mat - other.mat, self._merge_basis(other))
        return NotImplemented

    def __neg__(self):
        return OperatorMatrix(-self.mat, self.basis)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex)):
            return OperatorMatrix(self.mat * scalar, self.basis)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return OperatorMatrix(self.mat / scalar, self.basis)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.mat @ other.mat, self._merge_basis(other))
        return NotImplemented

    def __repr__(self):
        return f"OperatorMatrix(dim={self.dim}, basis={self.basis!r})"


def _destroy(dim: int) -> np.ndarray:
    mat = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        mat[n - 1, n] = np.sqrt(n)
    return mat


def annihilation(dim: int) -> OperatorMatrix:
    """a |n> = sqrt(n) |n-1>, truncated at dim levels."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    return OperatorMatrix(_destroy(dim), FockSpace((dim,)))


def creation(dim: int) -> OperatorMatrix:
    if dim < 2:
        raise ValueError("dim must be at least 2")
    return OperatorMatrix(_destroy(dim).conj().T, FockSpace((dim,)))


def number(dim: int) -> OperatorMatrix:
    if dim < 2:
        raise ValueError("dim must be at least 2")
    return OperatorMatrix(np.diag(np.arange(dim, dtype=complex)), FockSpace((dim,)))


def _weyl_single_mode(k: int, l: int, dim: int) -> np.ndarray:
    """Average of all interleavings of k annihilators and l creators."""
    total_factors = k + l
    if total_factors == 0:
        return np.eye(dim, dtype=complex)
    a = _destroy(dim)
    ad = a.conj().T
    accum = np.zeros((dim, dim), dtype=complex)
    for positions in combinations(range(total_factors), k):
        chosen = set(positions)
        word = np.eye(dim, dtype=complex)
        for slot in range(total_factors):
            word = word @ (a if slot in chosen else ad)
        accum += word
    return accum / comb(total_factors, k)


def _normal_single_mode(k: int, l: int, dim: int) -> np.ndarray:
    a = _destroy(dim)
    ad = a.conj().T
    return np.linalg.matrix_power(ad, l) @ np.linalg.matrix_power(a, k)


def _quantize(poly, space: FockSpace, single_mode) -> OperatorMatrix:
    if poly.mode_count != space.n_modes:
        raise ValueError(
            f"polynomial has {poly.mode_count} modes, space has {space.n_modes}"
        )
    total = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for key, coeff in poly.terms.items():
        degree = sum(key)
        if degree > MAX_QUANTIZE_DEGREE:
            raise ValueError(
                f"monomial degree {degree} exceeds the symmetrization limit {MAX_QUANTIZE_DEGREE}"
            )
        factor = np.array([[coeff]], dtype=complex)
        for mode, dim in enumerate(space.mode_dims):
            k = key[2 * mode]
            l = key[2 * mode + 1]
            factor = np.kron(factor, single_mode(k, l, dim))
        total += factor
    return OperatorMatrix(total, space)


def weyl_quantize(poly, space: FockSpace) -> OperatorMatrix:
    """Symmetric (Weyl) quantization: z -> a, z* -> a+, mixed powers averaged
    over every distinct operator ordering."""
    return _quantize(poly, space, _weyl_single_mode)


def normal_quantize(poly, space: FockSpace) -> OperatorMatrix:
    """Normal-ordered quantization: z^k z*^l -> (a+)^l a^k."""
    return _quantize(poly, space, _normal_single_mode)


def quantize(poly, space: FockSpace, ordering: str = "weyl") -> OperatorMatrix:
    if ordering == "weyl":
        return weyl_quantize(poly, space)
    if ordering == "normal":
        return normal_quantize(poly, space)
    raise ValueError(f"unknown ordering {ordering!r}")


def tensor_embed(op: OperatorMatrix, mode: int, space: FockSpace) -> OperatorMatrix:
    """Embed a single-mode operator at the given mode, identity elsewhere."""
    if not 0 <= mode < space.n_modes:
        raise ValueError(f"mode {mode} out of range")
    if op.dim != space.mode_dims[mode]:
        raise ValueError(
            f"operator dim {op.dim} does not match mode dim {space.mode_dims[mode]}"
        )
    out = np.array([[1.0 + 0j]])
    for a, dim in enumerate(space.mode_dims):
        out = np.kron(out, op.mat if a == mode else np.eye(dim, dtype=complex))
    return OperatorMatrix(out, space)


def schwinger_spin(space: FockSpace) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Angular momentum bilinears of two Bose modes.

    l_x = (a1+ a2 + a2+ a1)/2, l_y = i(a2+ a1 - a1+ a2)/2,
    l_z = (a1+ a1 - a2+ a2)/2.  They commute with the total number operator;
    each total-occupation block carries the spin-(N/2) representation.
    """
    if space.n_modes != 2:
        raise ValueError("the Schwinger construction needs exactly two modes")
    a1 = tensor_embed(annihilation(space.mode_dims[0]), 0, space).mat
    a2 = tensor_embed(annihilation(space.mode_dims[1]), 1, space).mat
    lx = (a1.conj().T @ a2 + a2.conj().T @ a1) / 2.0
    ly = 1j * (a2.conj().T @ a1 - a1.conj().T @ a2) / 2.0
    lz = (a1.conj().T @ a1 - a2.conj().T @ a2) / 2.0
    return (
        OperatorMatrix(lx, space),
        OperatorMatrix(ly, space),
        OperatorMatrix(lz, space),
    )


def spin_operators(rep: SpinRep) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Standard (2l+1)-dimensional angular momentum matrices.

    Basis ordered m = l, l-1, ..., -l, so l = 1/2 gives the Pauli matrices
    over two.  Satisfies [l_i, l_j] = i eps_ijk l_k and
    l_x^2 + l_y^2 + l_z^2 = l(l+1).
    """
    l = rep.l
    dim = rep.dim
    ms = [l - i for i in range(dim)]
    lz = np.diag(np.array(ms, dtype=complex))
    lplus = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        m = ms[i]
        lplus[i - 1, i] = np.sqrt(l * (l + 1) - m * (m + 1))
    lminus = lplus.conj().T
    lx = (lplus + lminus) / 2.0
    ly = (lplus - lminus) / 2j
    return (
        OperatorMatrix(lx, rep),
        OperatorMatrix(ly, rep),
        OperatorMatrix(lz, rep),
    )


def symmetrize_product(ops: list[OperatorMatrix]) -> OperatorMatrix:
    """Average of the product over all orderings of the factors."""
    if not ops:
        raise ValueError("symmetrize_product needs at least one operator")
    dim = ops[0].dim
    basis = ops[0].basis
    for op in ops[1:]:
        if op.dim != dim:
            raise ValueError("operator dimension mismatch in symmetrize_product")
        if op.basis != basis:
            basis = None
    accum = np.zeros((dim, dim), dtype=complex)
    count = 0
    for order in permutations(range(len(ops))):
        word = np.eye(dim, dtype=complex)
        for index in order:
            word = word @ ops[index].mat
        accum += word
        count += 1
    return OperatorMatrix(accum / count, basis)


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(a.mat @ b.mat - b.mat @ a.mat, a._merge_basis(b))


def export_operator_csv(op: OperatorMatrix, path):
    """Dump as `row, col, re, im` rows (all entries, row-major)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["row", "col", "re", "im"])
        for i in range(op.dim):
            for j in range(op.dim):
                value = op.mat[i, j]
                writer.writerow([i, j, f"{value.real:.17g}", f"{value.imag:.17g}"])
