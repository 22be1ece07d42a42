"""Single-qubit noise channels and their i.i.d. application to registers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import ID2, PAULI_X, PAULI_Y, PAULI_Z, DensityMatrix, apply_local_kraus, dagger


@dataclass(frozen=True)
class KrausChannel:
    """A completeness-satisfying set of 2x2 Kraus operators."""

    kraus_ops: tuple[np.ndarray, ...]
    label: str
    strength: float

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus_ops)
        object.__setattr__(self, "kraus_ops", ops)
        comp = sum(dagger(k) @ k for k in ops)
        if np.max(np.abs(comp - ID2)) > 1e-12:
            raise ValueError(f"Kraus operators of '{self.label}' violate completeness")

    def apply_to_matrix(self, m: np.ndarray) -> np.ndarray:
        """Action on a bare 2x2 matrix."""
        out = np.zeros_like(m, dtype=np.complex128)
        for k in self.kraus_ops:
            out += k @ m @ dagger(k)
        return out

    def choi(self) -> np.ndarray:
        """Choi matrix sum_k vec(K_k) vec(K_k)^dag (column-major vec)."""
        c = np.zeros((4, 4), dtype=np.complex128)
        for k in self.kraus_ops:
            v = k.reshape(-1, order="F")
            c += np.outer(v, v.conj())
        return c


def _check_prob(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p}")
    return p


def identity_channel() -> KrausChannel:
    return KrausChannel((ID2.copy(),), label="identity", strength=0.0)


def dephasing(p: float) -> KrausChannel:
    """Phase-flip channel rho -> (1-p) rho + p Z rho Z.

    p = 1/2 is complete dephasing (kills all off-diagonals).
    """
    p = _check_prob(p, "p")
    return KrausChannel(
        (np.sqrt(1.0 - p) * ID2, np.sqrt(p) * PAULI_Z),
        label="dephasing",
        strength=p,
    )


def depolarizing(p: float) -> KrausChannel:
    """Depolarizing channel whose action equals (1-p) rho + p I/2.

    Standard Kraus decomposition {sqrt(1-3p/4) I, sqrt(p/4) X, Y, Z}.
    """
    p = _check_prob(p, "p")
    return KrausChannel(
        (
            np.sqrt(1.0 - 0.75 * p) * ID2,
            np.sqrt(0.25 * p) * PAULI_X,
            np.sqrt(0.25 * p) * PAULI_Y,
            np.sqrt(0.25 * p) * PAULI_Z,
        ),
        label="depolarizing",
        strength=p,
    )


def amplitude_damping(eta: float) -> KrausChannel:
    """Decay channel in the {ground, excited} = {|0>, |1>} basis.

    D0 = diag(1, sqrt(1-eta)), D1 = sqrt(eta) |0><1|.
    """
    eta = _check_prob(eta, "eta")
    d0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - eta)]], dtype=np.complex128)
    d1 = np.array([[0.0, np.sqrt(eta)], [0.0, 0.0]], dtype=np.complex128)
    return KrausChannel((d0, d1), label="amplitude-damping", strength=eta)


def apply_iid(rho: DensityMatrix, channel: KrausChannel, qubits: Sequence[int]) -> DensityMatrix:
    """Apply the same single-qubit channel to each listed qubit.

    Per-qubit applications commute, so the result is order-independent.
    """
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices in {qubits}")
    out = rho
    for q in qubits:
        out = apply_local_kraus(out, channel, q)
    return out


def apply_iid_family(family, channel: KrausChannel, qubits: Sequence[int]):
    """Push a state and its parameter derivatives through the same i.i.d. channel.

    The channel is parameter-independent and linear, so it maps derivatives
    to derivatives.
    """
    from .source import ParamDerivativeFamily
    from .qcore import apply_matrix_kraus

    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices in {qubits}")
    state = apply_iid(family.state, channel, qubits)
    dims = family.state.factor_dims
    d_phi, d_gamma = family.d_phi, family.d_gamma
    for q in qubits:
        d_phi = apply_matrix_kraus(d_phi, dims, q, channel.kraus_ops)
        d_gamma = apply_matrix_kraus(d_gamma, dims, q, channel.kraus_ops)
    return ParamDerivativeFamily(state=state, d_phi=d_phi, d_gamma=d_gamma)
