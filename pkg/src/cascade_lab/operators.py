"""Composite Hilbert spaces and the operators acting on them.

Basis conventions used throughout the package:

* two-level systems are ordered ``(|g>, |e>)``, so the ground state is index 0
  and ``sigma_z = |e><e| - |g><g| = diag(-1, 1)``;
* bosonic modes are truncated Fock ladders with the vacuum at index 0;
* composite spaces are ordered as (source TLS, mode 1, mode 2) or
  (source TLS, target qubit 1, target qubit 2).

Operators up to dimension 64 are stored as dense ``ndarray``; larger ones as
CSR matrices. Conversion between the two is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from numbers import Number
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

DENSE_LIMIT = 64
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-8


class DimensionError(ValueError):
    """Raised for invalid or mismatched subsystem dimensions."""


class InvalidStateError(ValueError):
    """Raised when a matrix fails the density-matrix invariants."""


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor product of finite subsystems."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"invalid subsystem dimensions {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.dims)


def _store(data, size: int):
    if sp.issparse(data):
        data = data.tocsr().astype(complex)
        return data.toarray() if size <= DENSE_LIMIT else data
    data = np.asarray(data, dtype=complex)
    return data if size <= DENSE_LIMIT else sp.csr_matrix(data)


class Operator:
    """Complex matrix tagged with the Hilbert space it acts on.

    Instances are treated as immutable; every arithmetic operation returns a
    new operator. Operators only combine with operators on an equal space.
    """

    __slots__ = ("space", "data")
    __array_priority__ = 100

    def __init__(self, data, space: HilbertSpace | Sequence[int] | None = None):
        shape = data.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise DimensionError(f"operator matrix must be square, got {shape}")
        if space is None:
            space = HilbertSpace((shape[0],))
        elif not isinstance(space, HilbertSpace):
            space = HilbertSpace(tuple(space))
        if space.size != shape[0]:
            raise DimensionError(
                f"matrix of size {shape[0]} does not match space {space.dims}")
        self.space = space
        self.data = _store(data, space.size)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.space.dims

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def full(self) -> np.ndarray:
        """Dense copy of the matrix."""
        return self.data.toarray() if self.is_sparse else np.array(self.data)

    def sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.data)

    def dag(self) -> "Operator":
        return Operator(self.data.conj().T, self.space)

    def conj(self) -> "Operator":
        return Operator(self.data.conj(), self.space)

    def trans(self) -> "Operator":
        return Operator(self.data.T, self.space)

    def tr(self) -> complex:
        return complex(self.data.diagonal().sum())

    def expect(self, rho: "Operator") -> complex:
        """``Tr[self @ rho]``."""
        self._check(rho)
        a, b = self.data, rho.data
        if sp.issparse(a) or sp.issparse(b):
            return complex(sp.csr_matrix(a).multiply(sp.csr_matrix(b).T).sum())
        return complex(np.einsum("ij,ji->", a, b))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        diff = self.data - self.data.conj().T
        if sp.issparse(diff):
            return diff.count_nonzero() == 0 or abs(diff).max() <= tol
        return bool(np.max(np.abs(diff), initial=0.0) <= tol)

    def eigenvalues(self, hermitian: bool = False) -> np.ndarray:
        m = self.full()
        return np.linalg.eigvalsh(m) if hermitian else np.linalg.eigvals(m)

    def _check(self, other: "Operator"):
        if other.space != self.space:
            raise DimensionError(
                f"operators on different spaces {self.dims} and {other.dims}")

    def __add__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.data + other.data, self.space)
        if isinstance(other, Number) and other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.data - other.data, self.space)
        return NotImplemented

    def __neg__(self):
        return Operator(-self.data, self.space)

    def __mul__(self, other):
        if isinstance(other, Number):
            return Operator(self.data * other, self.space)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return Operator(self.data / other, self.space)
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.data @ other.data, self.space)
        return NotImplemented

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"Operator(dims={self.dims}, {kind})"


class DensityMatrix(Operator):
    """Operator satisfying unit trace, Hermiticity and positivity."""

    __slots__ = ()

    def __init__(self, data, space=None, check: bool = True):
        super().__init__(data, space)
        if check:
            self.validate()

    @classmethod
    def from_operator(cls, op: Operator, check: bool = True) -> "DensityMatrix":
        return cls(op.data, op.space, check=check)

    def validate(self):
        tr = self.tr()
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace {tr} differs from 1")
        if not self.is_hermitian():
            raise InvalidStateError("density matrix is not Hermitian")
        lam = np.linalg.eigvalsh(self.full()).min()
        if lam < POSITIVITY_TOL:
            raise InvalidStateError(f"negative eigenvalue {lam:.3e}")

    def purity(self) -> float:
        return float(self.expect(self).real)


# --- constructors --------------------------------------------------------------


def identity(space: HilbertSpace | int | Sequence[int]) -> Operator:
    if isinstance(space, int):
        space = HilbertSpace((space,))
    elif not isinstance(space, HilbertSpace):
        space = HilbertSpace(tuple(space))
    return Operator(sp.identity(space.size, dtype=complex, format="csr"), space)


def destroy(n_levels: int) -> Operator:
    """Annihilation operator truncated to ``n_levels`` Fock states."""
    if n_levels < 2:
        raise DimensionError(f"need at least 2 levels, got {n_levels}")
    return Operator(np.diag(np.sqrt(np.arange(1, n_levels)), k=1))


def create(n_levels: int) -> Operator:
    return destroy(n_levels).dag()


def num(n_levels: int) -> Operator:
    return Operator(np.diag(np.arange(n_levels, dtype=float)))


_PAULI = {
    "x": [[0, 1], [1, 0]],
    "y": [[0, 1j], [-1j, 0]],
    "z": [[-1, 0], [0, 1]],
    "plus": [[0, 0], [1, 0]],
    "minus": [[0, 1], [0, 0]],
}


def pauli(kind: str) -> Operator:
    """Pauli or ladder matrix in the ``(|g>, |e>)`` basis.

    ``plus`` is ``|e><g|``, ``minus`` is ``|g><e|`` and ``y`` is
    ``-i(plus - minus)`` so that ``[x, y] = 2i z``.
    """
    try:
        return Operator(np.array(_PAULI[kind], dtype=complex))
    except KeyError:
        raise ValueError(f"unknown Pauli kind {kind!r}") from None


def basis(n: int, index: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[index] = 1.0
    return v


def tensor(*ops: Operator) -> Operator:
    """Kronecker product in the given subsystem order."""
    dims = tuple(d for op in ops for d in op.dims)
    space = HilbertSpace(dims)
    if space.size <= DENSE_LIMIT:
        data = reduce(np.kron, [op.full() for op in ops])
    else:
        data = reduce(lambda a, b: sp.kron(a, b, format="csr"),
                      [op.sparse() for op in ops])
    return Operator(data, space)


def embed(op: Operator, space: HilbertSpace | Sequence[int], position: int) -> Operator:
    """Place a single-subsystem operator at ``position`` of ``space``."""
    if not isinstance(space, HilbertSpace):
        space = HilbertSpace(tuple(space))
    if not 0 <= position < len(space):
        raise DimensionError(f"position {position} outside {space.dims}")
    if op.space.size != space.dims[position]:
        raise DimensionError(
            f"operator of dimension {op.space.size} cannot act on factor "
            f"{position} of {space.dims}")
    left = int(np.prod(space.dims[:position]))
    right = int(np.prod(space.dims[position + 1:]))
    data = sp.kron(sp.kron(sp.identity(left, format="csr"), op.sparse()),
                   sp.identity(right, format="csr"), format="csr")
    return Operator(data, space)


def ket2dm(psi: np.ndarray, space: HilbertSpace | Sequence[int] | None = None) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), space)


def partial_trace(rho: Operator, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the factors listed in ``keep`` (kept in space order)."""
    keep = sorted(set(int(k) for k in keep))
    dims = rho.dims
    if not keep:
        raise DimensionError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"positions {keep} outside {dims}")
    n = len(dims)
    t = rho.full().reshape(dims + dims)
    # contract traced indices pairwise; letters index row/column axes
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[i] for i in range(n)]
    col = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    red = np.einsum("".join(row + col) + "->" + "".join(out), t)
    kd = tuple(dims[i] for i in keep)
    size = int(np.prod(kd))
    red = red.reshape(size, size)
    red = 0.5 * (red + red.conj().T)
    return DensityMatrix(red, HilbertSpace(kd))
