"""Dense complex linear algebra and multi-qubit tensor machinery.

Conventions used throughout the package:

* Subsystem addressing is positional.  Factor ``k`` of a ``DensityMatrix``
  is the k-th Kronecker slot: the basis index of ``|b0 b1 ... b_{n-1}>`` is
  ``sum_k b_k * prod(dims[k+1:])``, i.e. factor 0 is the leftmost slot in
  ket notation and the outermost factor of ``np.kron``.
* Registers are capped at 12 qubits (dimension 4096); everything is dense.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
EIG_TOL = 1e-10

MAX_QUBITS = 12

# single-qubit constants
ID2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = {"I": ID2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class KrausCompletenessError(ValueError):
    """Kraus operators do not satisfy the completeness relation."""


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product with the first argument's indices outermost."""
    out = np.asarray(ops[0], dtype=np.complex128)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def ket(bits: Sequence[int], dims: Sequence[int] | None = None) -> np.ndarray:
    """Basis column vector for the given digit string."""
    if dims is None:
        dims = [2] * len(bits)
    dim = prod(dims)
    idx = 0
    for b, d in zip(bits, dims):
        if not 0 <= b < d:
            raise ValueError(f"digit {b} out of range for dimension {d}")
        idx = idx * d + b
    v = np.zeros(dim, dtype=np.complex128)
    v[idx] = 1.0
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def is_hermitian(m: np.ndarray, atol: float = HERMITICITY_ATOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace, Hermitian, PSD matrix over a labeled tensor factorization.

    ``factor_dims`` lists the subsystem dimensions in Kronecker order; their
    product must equal the matrix dimension.  Hermiticity and trace are
    checked on construction; positivity via :meth:`validate` (an O(dim^3)
    eigenvalue check that callers invoke at trust boundaries).
    """

    matrix: np.ndarray
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "factor_dims", tuple(int(d) for d in self.factor_dims))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        if prod(self.factor_dims) != m.shape[0]:
            raise ValueError(
                f"factor dims {self.factor_dims} inconsistent with dimension {m.shape[0]}"
            )
        if not is_hermitian(m):
            raise NonHermitianError("density matrix is not Hermitian to 1e-12")
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace {tr} differs from 1 beyond 1e-10")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_factors(self) -> int:
        return len(self.factor_dims)

    def validate(self) -> "DensityMatrix":
        """Full check including positivity (smallest eigenvalue >= -1e-10)."""
        w = np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))
        if w[0] < -PSD_ATOL:
            raise ValueError(f"density matrix has negative eigenvalue {w[0]}")
        return self

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class HermitianEigensystem:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig_hermitian(h: np.ndarray, tol: float = EIG_TOL) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (H + H^dag)/2 before decomposition to absorb
    round-off; inputs that are not Hermitian within ``tol`` are rejected.
    """
    h = np.asarray(h, dtype=np.complex128)
    if np.max(np.abs(h - h.conj().T)) > tol:
        raise NonHermitianError("matrix is not Hermitian to 1e-10")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return HermitianEigensystem(eigenvalues=w, eigenvectors=v)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state over the kept subsystems; factor order is preserved."""
    keep = sorted(set(int(k) for k in keep))
    dims = rho.factor_dims
    n = len(dims)
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"subsystem index {k} out of range for {n} factors")
    traced = [q for q in range(n) if q not in keep]
    t = rho.matrix.reshape(dims + dims)
    # contract row/column indices of every traced factor
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    d_keep = prod(dims[k] for k in keep) if keep else 1
    out = t.reshape(d_keep, d_keep)
    return DensityMatrix(out, tuple(dims[k] for k in keep))


def _apply_left(mat: np.ndarray, dims: Sequence[int], pos: int, op: np.ndarray) -> np.ndarray:
    """op acting on factor ``pos`` from the left: (I (x) op (x) I) @ mat."""
    d = dims[pos]
    left = prod(dims[:pos])
    right = prod(dims[pos + 1:])
    t = mat.reshape(left, d, right * mat.shape[1])
    t = np.matmul(op, t)
    return t.reshape(mat.shape)


def _apply_right(mat: np.ndarray, dims: Sequence[int], pos: int, op: np.ndarray) -> np.ndarray:
    """op^dag acting on factor ``pos`` from the right: mat @ (I (x) op (x) I)^dag."""
    d = dims[pos]
    left = prod(dims[:pos])
    right = prod(dims[pos + 1:])
    t = mat.reshape(mat.shape[0] * left, d, right)
    t = np.matmul(op.conj(), t)
    return t.reshape(mat.shape)


def apply_one_site(mat: np.ndarray, dims: Sequence[int], pos: int, op: np.ndarray) -> np.ndarray:
    """Conjugate a square matrix by a single-site operator: (op on pos) M (op on pos)^dag."""
    return _apply_right(_apply_left(mat, dims, pos, op), dims, pos, op)


def apply_matrix_kraus(
    mat: np.ndarray, dims: Sequence[int], pos: int, kraus_ops: Sequence[np.ndarray]
) -> np.ndarray:
    """Sum_k (K_k on pos) M (K_k on pos)^dag for a square matrix M.

    Implemented by pairing the factor's row and column indices and applying
    the d^2 x d^2 channel superoperator sum_k K_k (x) conj(K_k) in a single
    small product, which keeps large registers memory-bound rather than
    GEMM-bound.
    """
    d = dims[pos]
    superop = sum(np.kron(k, k.conj()) for k in kraus_ops)
    left = prod(dims[:pos])
    right = prod(dims[pos + 1:])
    t = mat.reshape(left, d, right, left, d, right)
    t = t.transpose(1, 4, 0, 2, 3, 5).reshape(d * d, -1)
    t = superop @ t
    t = t.reshape(d, d, left, right, left, right).transpose(2, 0, 3, 4, 1, 5)
    return np.ascontiguousarray(t).reshape(mat.shape)


def apply_local_kraus(rho: DensityMatrix, channel, qubit: int) -> DensityMatrix:
    """Apply a single-qubit Kraus channel to one factor of a state.

    The target factor must have dimension 2.  Channel completeness is
    verified to 1e-10 before application; the output trace is preserved to
    1e-12 by construction.
    """
    if not 0 <= qubit < rho.num_factors:
        raise IndexError(f"qubit index {qubit} out of range")
    if rho.factor_dims[qubit] != 2:
        raise ValueError(f"target factor {qubit} has dimension {rho.factor_dims[qubit]}, need 2")
    ops = list(channel.kraus_ops)
    comp = sum(dagger(k) @ k for k in ops)
    if np.max(np.abs(comp - ID2)) > 1e-10:
        raise KrausCompletenessError("Kraus completeness violated beyond 1e-10")
    out = apply_matrix_kraus(rho.matrix, rho.factor_dims, qubit, ops)
    return DensityMatrix(out, rho.factor_dims)


def apply_vec_pauli_string(
    vec: np.ndarray, string: str, positions: Sequence[int] | None = None, n: int | None = None
) -> np.ndarray:
    """Apply a Pauli string to a state vector of qubits.

    ``positions`` maps each letter to a qubit slot (defaults to 0..len-1 of
    an n-qubit register, n inferred from the vector).
    """
    if n is None:
        n = int(round(np.log2(vec.size)))
    if positions is None:
        positions = range(len(string))
    dims = [2] * n
    out = vec.reshape(-1, 1)
    for letter, pos in zip(string, positions):
        if letter == "I":
            continue
        out = _apply_left(out, dims, pos, PAULIS[letter])
    return out.reshape(vec.shape)


def apply_mat_pauli_string_left(
    mat: np.ndarray, string: str, positions: Sequence[int], n: int
) -> np.ndarray:
    dims = [2] * n
    out = mat
    for letter, pos in zip(string, positions):
        if letter == "I":
            continue
        out = _apply_left(out, dims, pos, PAULIS[letter])
    return out


def conjugate_mat_pauli_string(
    mat: np.ndarray, string: str, positions: Sequence[int], n: int
) -> np.ndarray:
    """P M P^dag for a Pauli string P embedded at the given qubit slots."""
    dims = [2] * n
    out = mat
    for letter, pos in zip(string, positions):
        if letter == "I":
            continue
        out = apply_one_site(out, dims, pos, PAULIS[letter])
    return out


def pauli_string_matrix(string: str) -> np.ndarray:
    """Dense matrix of a Pauli string (leftmost letter outermost)."""
    return tensor(*(PAULIS[c] for c in string))


def paulis_commute(a: str, b: str) -> bool:
    """Whether two equal-length Pauli strings commute."""
    anti = 0
    for x, y in zip(a, b):
        if x != "I" and y != "I" and x != y:
            anti += 1
    return anti % 2 == 0


def embed_operator(op: np.ndarray, positions: Sequence[int], n: int) -> np.ndarray:
    """Extend an operator on k qubits to n qubits at the given slots.

    Decomposes the operator over elementary matrix units of the addressed
    qubits; intended for small registers (encoder circuits), not hot loops.
    """
    positions = list(positions)
    k = len(positions)
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    if len(set(positions)) != k or any(not 0 <= p < n for p in positions):
        raise ValueError(f"bad qubit positions {positions}")
    units = [np.zeros((2, 2), dtype=np.complex128) for _ in range(4)]
    for a in range(2):
        for b in range(2):
            units[2 * a + b][a, b] = 1.0
    out = np.zeros((2 ** n, 2 ** n), dtype=np.complex128)
    for row in range(2 ** k):
        for col in range(2 ** k):
            c = op[row, col]
            if c == 0:
                continue
            factors = [ID2] * n
            for slot, pos in enumerate(positions):
                a = (row >> (k - 1 - slot)) & 1
                b = (col >> (k - 1 - slot)) & 1
                factors[pos] = units[2 * a + b]
            out += c * tensor(*factors)
    return out


def random_density_matrix(rng: np.random.Generator, dims: Sequence[int]) -> DensityMatrix:
    """Haar-ish random full-rank state, for tests."""
    dim = prod(dims)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    m /= m.trace()
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m, tuple(dims))
