"""Capture-and-imprint circuit simulation at the logical level.

Teleportation of the captured dual-rail photon state onto the register pair,
the entangled-ancilla parity projection that filters out the vacuum, and the
two-Bell-pair parity discrimination of zero/one/two-photon events.

Logical qubits are simulated as single qubits; physical-level runs compose
these maps with the code/recovery modules.  Photon capture inside the
teleportation is idealized (unit transfer fidelity); the pulse-dynamics
module quantifies the actual infidelity separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    DensityMatrix,
    ID2,
    PAULI_X,
    PAULI_Z,
    embed_operator,
    ket,
    partial_trace,
    projector,
    tensor,
)
from .source import SourceParams, fock_expansion

BELL_PHI_PLUS = (ket([0, 0]) + ket([1, 1])) / np.sqrt(2.0)
BELL_PHI_MINUS = (ket([0, 0]) - ket([1, 1])) / np.sqrt(2.0)
BELL_PSI_PLUS = (ket([0, 1]) + ket([1, 0])) / np.sqrt(2.0)
BELL_PSI_MINUS = (ket([0, 1]) - ket([1, 0])) / np.sqrt(2.0)

# teleportation corrections per Bell outcome on (green, red)
_BELL_OUTCOMES = (
    ("phi+", BELL_PHI_PLUS, ID2),
    ("phi-", BELL_PHI_MINUS, PAULI_Z),
    ("psi+", BELL_PSI_PLUS, PAULI_X),
    ("psi-", BELL_PSI_MINUS, PAULI_Z @ PAULI_X),
)

CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(np.complex128)
PLUS = np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0], dtype=np.complex128) / np.sqrt(2.0)


class MalformedLabelsError(ValueError):
    """Protocol state does not carry the required subsystem labels."""


@dataclass(frozen=True)
class ProtocolState:
    """A multi-qubit state with named qubit slots."""

    state: DensityMatrix
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) != self.state.num_factors:
            raise MalformedLabelsError("one label per factor required")
        if len(set(self.labels)) != len(self.labels):
            raise MalformedLabelsError(f"duplicate labels in {self.labels}")

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise MalformedLabelsError(f"missing label '{label}'") from None


@dataclass(frozen=True)
class TeleportBranch:
    outcome: tuple[str, str]
    probability: float
    state: DensityMatrix


@dataclass(frozen=True)
class VacuumProjectionResult:
    accept_probability: float
    conditioned: DensityMatrix | None
    reject_probability: float
    rejected: DensityMatrix | None


@dataclass(frozen=True)
class DiscriminationOutcome:
    tag: str
    probability: float
    post_state: DensityMatrix


def teleport_capture_branches(photon_mixture: DensityMatrix) -> list[TeleportBranch]:
    """Bell-measurement branches of the capture-teleportation circuit.

    Register/green ancilla pairs start in (|00> + |11>)/sqrt2 at each site;
    the red ancillae inherit the dual-rail photon state (ideal transfer,
    |0_R> -> |1_R> exactly where a photon is present).  Each of the 16 joint
    Bell outcomes on (green, red) is projected out and the outcome-dependent
    Pauli correction applied to the registers.  After correction all branches
    coincide.
    """
    if photon_mixture.dim != 4:
        raise ValueError("photon mixture must live on the two-site dual-rail space")
    # factor order: (L_A, G_A, L_B, G_B, R_A, R_B)
    n = 6
    rho0 = tensor(projector(BELL_PHI_PLUS), projector(BELL_PHI_PLUS), photon_mixture.matrix)
    perm_dims = (2,) * n
    pos = {"LA": 0, "GA": 1, "LB": 2, "GB": 3, "RA": 4, "RB": 5}
    branches = []
    for name_a, bell_a, corr_a in _BELL_OUTCOMES:
        proj_a = embed_operator(projector(bell_a), [pos["GA"], pos["RA"]], n)
        for name_b, bell_b, corr_b in _BELL_OUTCOMES:
            proj_b = embed_operator(projector(bell_b), [pos["GB"], pos["RB"]], n)
            m = proj_a @ proj_b @ rho0 @ proj_b @ proj_a
            prob = float(np.real(np.trace(m)))
            if prob <= 1e-15:
                continue
            reduced = partial_trace(
                DensityMatrix(m / prob, perm_dims), keep=[pos["LA"], pos["LB"]]
            )
            corr = np.kron(corr_a, corr_b)
            fixed = corr @ reduced.matrix @ corr.conj().T
            branches.append(
                TeleportBranch(
                    outcome=(name_a, name_b),
                    probability=prob,
                    state=DensityMatrix(fixed, (2, 2)),
                )
            )
    return branches


def teleport_capture(photon_mixture: DensityMatrix) -> DensityMatrix:
    """Outcome-averaged logical register state after capture teleportation."""
    branches = teleport_capture_branches(photon_mixture)
    avg = sum(b.probability * b.state.matrix for b in branches)
    return DensityMatrix(avg, (2, 2))


def _parity_projectors(n: int, anc_positions: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """(even, odd) X-basis parity projectors on an ancilla pair."""
    pp = projector(np.kron(PLUS, PLUS)) + projector(np.kron(MINUS, MINUS))
    pm = projector(np.kron(PLUS, MINUS)) + projector(np.kron(MINUS, PLUS))
    return embed_operator(pp, anc_positions, n), embed_operator(pm, anc_positions, n)


def vacuum_projection(rho_ab: DensityMatrix) -> VacuumProjectionResult:
    """Parity projection filtering out the vacuum component.

    A fresh (|00>+|11>)/sqrt2 ancilla pair is attached, one CZ per site maps
    register parity onto the pair, and both ancillae are measured in the X
    basis.  The odd-parity outcome heralds a captured photon; the conditioned
    register state is returned together with the rejected branch.
    """
    if rho_ab.dim != 4:
        raise ValueError("register state must be two logical qubits")
    n = 4  # (L_A, L_B, anc_A, anc_B)
    full = tensor(rho_ab.matrix, projector(BELL_PHI_PLUS))
    cz_a = embed_operator(CZ, [0, 2], n)
    cz_b = embed_operator(CZ, [1, 3], n)
    evolved = cz_b @ cz_a @ full @ cz_a.conj().T @ cz_b.conj().T
    p_even, p_odd = _parity_projectors(n, (2, 3))
    out = {}
    for key, proj in (("even", p_even), ("odd", p_odd)):
        m = proj @ evolved @ proj
        prob = float(np.real(np.trace(m)))
        if prob > 1e-15:
            reduced = partial_trace(DensityMatrix(m / prob, (2,) * n), keep=[0, 1])
        else:
            prob = max(prob, 0.0)
            reduced = None
        out[key] = (prob, reduced)
    return VacuumProjectionResult(
        accept_probability=out["odd"][0],
        conditioned=out["odd"][1],
        reject_probability=out["even"][0],
        rejected=out["even"][1],
    )


def captured_protocol_state(
    params: SourceParams, delta: float = 0.0
) -> ProtocolState:
    """State of the level/photon qubits after ideal capture of the thermal
    source, truncated at two photons.

    Labels (lA, pA, lB, pB): ``l`` marks the non-radiative atomic level at
    each site, ``p`` a second cavity photon left behind by a double event.
    ``delta`` is the dispersive phase picked up by the doubly-occupied
    |1,0>|1,0> configuration.  The O(eps^3) remainder is renormalized away.
    """
    dec = fock_expansion(params)
    phi = params.phi
    dims = [2, 2, 2, 2]

    vac = ket([0, 0, 0, 0], dims)
    one_b = ket([0, 0, 1, 0], dims)   # photon captured at site B
    one_a = ket([1, 0, 0, 0], dims)   # photon captured at site A
    u = ket([1, 1, 0, 0], dims)       # both photons at A
    v = ket([0, 0, 1, 1], dims)       # both photons at B
    m = ket([1, 0, 1, 0], dims)       # one photon captured at each site

    e1 = np.exp(1j * phi)
    em1 = np.exp(-1j * phi)
    em2 = np.exp(-2j * phi)
    ed = np.exp(1j * delta)

    psi_plus = (one_b + e1 * one_a) / np.sqrt(2.0)
    psi_minus = (one_b - e1 * one_a) / np.sqrt(2.0)
    two_sym0 = (u - em2 * v) / np.sqrt(2.0)
    two_plus = (u + np.sqrt(2.0) * em1 * ed * m + em2 * v) / 2.0
    two_minus = (u - np.sqrt(2.0) * em1 * ed * m + em2 * v) / 2.0

    rho = dec.p00 * projector(vac)
    rho += dec.one_photon.weight_plus * projector(psi_plus)
    rho += dec.one_photon.weight_minus * projector(psi_minus)
    rho += dec.two_photon.weight_sym0 * projector(two_sym0)
    rho += dec.two_photon.weight_plus * projector(two_plus)
    rho += dec.two_photon.weight_minus * projector(two_minus)
    rho /= np.real(np.trace(rho))
    return ProtocolState(
        state=DensityMatrix(rho, (2, 2, 2, 2)), labels=("lA", "pA", "lB", "pB")
    )


def multiphoton_discriminate(state: ProtocolState) -> list[DiscriminationOutcome]:
    """Two-Bell-pair parity checks distinguishing photon-number sectors.

    Level qubits are parity-checked against one shared pair, cavity-photon
    qubits against a second; measuring both pairs maps

        (even_l, even_p) -> zero_or_contaminated
        (odd_l,  even_p) -> one_photon
        (odd_l,  odd_p)  -> two_photon  (coherence phase 2*phi)

    The (even_l, odd_p) pattern never occurs for well-formed inputs; if it
    carries weight it is reported under tag ``unexpected_parity`` rather than
    silently dropped.
    """
    for lbl in ("lA", "pA", "lB", "pB"):
        state.position(lbl)
    sys_n = state.state.num_factors
    n = sys_n + 4
    full = tensor(
        state.state.matrix, projector(BELL_PHI_PLUS), projector(BELL_PHI_PLUS)
    )
    al_a, al_b, ap_a, ap_b = sys_n, sys_n + 1, sys_n + 2, sys_n + 3
    evolved = full
    for ctrl, tgt in (
        (state.position("lA"), al_a),
        (state.position("lB"), al_b),
        (state.position("pA"), ap_a),
        (state.position("pB"), ap_b),
    ):
        cz = embed_operator(CZ, [ctrl, tgt], n)
        evolved = cz @ evolved @ cz.conj().T
    even_l, odd_l = _parity_projectors(n, (al_a, al_b))
    even_p, odd_p = _parity_projectors(n, (ap_a, ap_b))
    tags = {
        ("even", "even"): "zero_or_contaminated",
        ("odd", "even"): "one_photon",
        ("odd", "odd"): "two_photon",
        ("even", "odd"): "unexpected_parity",
    }
    outcomes = []
    for kl, pl in (("even", even_l), ("odd", odd_l)):
        for kp, pp in (("even", even_p), ("odd", odd_p)):
            m = pl @ pp @ evolved @ pp @ pl
            prob = float(np.real(np.trace(m)))
            if prob <= 1e-12:
                continue
            reduced = partial_trace(
                DensityMatrix(m / prob, (2,) * n), keep=list(range(sys_n))
            )
            outcomes.append(
                DiscriminationOutcome(
                    tag=tags[(kl, kp)], probability=prob, post_state=reduced
                )
            )
    return outcomes
