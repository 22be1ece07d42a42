"""Stabilizer codes and the two-block encoding isometry.

Pauli strings are written with qubit 0 leftmost ("XZZXI" puts X on qubit 0).
Repetition codes are defined in the X basis (phase-flip protective), so their
declared distance is the phase-flip distance n; a single repetition qubit is
the trivial code with computational-basis codewords, making its encoder the
identity map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .qcore import (
    DensityMatrix,
    apply_vec_pauli_string,
    ket,
    pauli_string_matrix,
    paulis_commute,
    tensor,
)

PLUS = np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0], dtype=np.complex128) / np.sqrt(2.0)


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, 1, d]] code with explicit codeword statevectors."""

    n: int
    k: int
    d: int
    stabilizers: tuple[str, ...]
    logical_x: str
    logical_z: str
    codeword0: np.ndarray
    codeword1: np.ndarray
    name: str

    def __post_init__(self):
        for s in self.stabilizers + (self.logical_x, self.logical_z):
            if len(s) != self.n:
                raise ValueError(f"Pauli string '{s}' has wrong length for n={self.n}")
        object.__setattr__(self, "codeword0", np.asarray(self.codeword0, np.complex128))
        object.__setattr__(self, "codeword1", np.asarray(self.codeword1, np.complex128))

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def encoding_isometry(self) -> np.ndarray:
        """2^n x 2 map |0> -> |codeword0>, |1> -> |codeword1>."""
        v = np.zeros((self.dim, 2), dtype=np.complex128)
        v[:, 0] = self.codeword0
        v[:, 1] = self.codeword1
        return v


def repetition_code(n: int) -> StabilizerCode:
    """Phase-flip repetition code: |0_L> = |+>^n, |1_L> = |->^n for n >= 2.

    Stabilizers are X_i X_{i+1}; logical Z is X^n and logical X is Z^n; the
    declared distance is the phase-flip distance n.  For n = 1 the code is
    trivial (codewords |0>, |1>, identity encoding).
    """
    if n < 1:
        raise ValueError(f"repetition code needs n >= 1, got {n}")
    if n == 1:
        return StabilizerCode(
            n=1, k=1, d=1,
            stabilizers=(),
            logical_x="X", logical_z="Z",
            codeword0=ket([0]), codeword1=ket([1]),
            name="rep-1",
        )
    stabs = []
    for i in range(n - 1):
        s = ["I"] * n
        s[i] = s[i + 1] = "X"
        stabs.append("".join(s))
    return StabilizerCode(
        n=n, k=1, d=n,
        stabilizers=tuple(stabs),
        logical_x="Z" * n,
        logical_z="X" * n,
        codeword0=tensor(*([PLUS.reshape(2, 1)] * n)).reshape(-1),
        codeword1=tensor(*([MINUS.reshape(2, 1)] * n)).reshape(-1),
        name=f"rep-{n}",
    )


def four_qubit_code() -> StabilizerCode:
    """[[4,1,2]] error-detecting code with codewords (|0000>+|1111>)/sqrt2,
    (|0011>+|1100>)/sqrt2."""
    cw0 = (ket([0, 0, 0, 0]) + ket([1, 1, 1, 1])) / np.sqrt(2.0)
    cw1 = (ket([0, 0, 1, 1]) + ket([1, 1, 0, 0])) / np.sqrt(2.0)
    return StabilizerCode(
        n=4, k=1, d=2,
        stabilizers=("XXXX", "ZZII", "IIZZ"),
        logical_x="IIXX",
        logical_z="IZZI",
        codeword0=cw0,
        codeword1=cw1,
        name="four-qubit",
    )


def five_qubit_code() -> StabilizerCode:
    """[[5,1,3]] code with cyclic generators XZZXI, IXZZX, XIXZZ, ZXIXZ."""
    stabs = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")
    dim = 32
    proj = np.eye(dim, dtype=np.complex128)
    for s in stabs:
        proj = 0.5 * (proj + pauli_string_matrix(s) @ proj)
    cw0 = proj @ ket([0] * 5)
    cw0 /= np.linalg.norm(cw0)
    cw1 = apply_vec_pauli_string(cw0, "XXXXX")
    return StabilizerCode(
        n=5, k=1, d=3,
        stabilizers=stabs,
        logical_x="XXXXX",
        logical_z="ZZZZZ",
        codeword0=cw0,
        codeword1=cw1,
        name="five-one-three",
    )


def stabilizer_group(code: StabilizerCode) -> set[str]:
    """All Pauli strings (phases dropped) generated by the stabilizers."""

    def mul(a: str, b: str) -> str:
        out = []
        for x, y in zip(a, b):
            if x == "I":
                out.append(y)
            elif y == "I" or x == y:
                out.append("I" if x == y else x)
            else:
                out.append(({"X", "Y", "Z"} - {x, y}).pop())
        return "".join(out)

    group = {"I" * code.n}
    for s in code.stabilizers:
        group |= {mul(s, g) for g in group}
    return group


def syndrome_of(code: StabilizerCode, error: str) -> tuple[int, ...]:
    """Syndrome bits: 1 where the error anticommutes with a generator."""
    return tuple(0 if paulis_commute(error, s) else 1 for s in code.stabilizers)


def enumerate_paulis(n: int, max_weight: int | None = None):
    """Pauli strings by ascending weight; within a weight class, supports in
    lexicographic order and letters in order Z < X < Y.

    The Z-first letter order resolves syndrome degeneracies (a Y error shares
    its syndrome with the Z error of the same support on X-type stabilizer
    codes) toward phase-flip corrections.
    """
    if max_weight is None:
        max_weight = n
    yield "I" * n
    for w in range(1, max_weight + 1):
        for support in itertools.combinations(range(n), w):
            for letters in itertools.product("ZXY", repeat=w):
                s = ["I"] * n
                for pos, letter in zip(support, letters):
                    s[pos] = letter
                yield "".join(s)


def encode_pair(code: StabilizerCode, logical: DensityMatrix) -> DensityMatrix:
    """Encode a two-qubit logical state into two code blocks (site A then B).

    Applies the isometry |b_A b_B> -> |b_A,L> (x) |b_B,L> to both sides;
    trace, Hermiticity, and purity are preserved.
    """
    if logical.dim != 4:
        raise ValueError(f"logical state must be two qubits (dim 4), got dim {logical.dim}")
    v_blk = code.encoding_isometry()
    v = np.kron(v_blk, v_blk)
    out = v @ logical.matrix @ v.conj().T
    return DensityMatrix(out, (2,) * (2 * code.n))


def pair_isometry(code: StabilizerCode) -> np.ndarray:
    """4^n x 4 isometry of the two-block encoding."""
    v_blk = code.encoding_isometry()
    return np.kron(v_blk, v_blk)
