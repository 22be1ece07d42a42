"""Two-mode thermal starlight model.

Covariance matrix, Fock-sector expansion truncated at two photons, and the
conditioned single-photon logical state family with analytic parameter
derivatives.

Dual-rail convention: ``|1_p>_A |vac>_B -> |10>`` and
``|vac>_A |1_p>_B -> |01>`` (site A is the leftmost qubit slot).  The phase
convention is anchored to the covariance matrix, whose a^dag-b cross term is
``gamma*eps*exp(-i phi)/2``; the single-photon eigenstates of the source are
then

    psi_pm(phi) = (|01> pm e^{i phi} |10>) / sqrt(2),

with the e^{i phi} amplitude riding the photon-at-A component.  The same
family doubles as the logical two-qubit family after capture, so the
conditioned state has <01|rho|10> = gamma e^{-i phi}/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import DensityMatrix, is_hermitian, ket

_DERIV_ATOL = 1e-12


@dataclass(frozen=True)
class SourceParams:
    """(epsilon, gamma, phi): mean total photon number, mutual coherence, phase."""

    epsilon: float
    gamma: float
    phi: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError(f"phi must be in [0, 2*pi), got {self.phi}")

    @property
    def n_a(self) -> float:
        """Occupation of the symmetric (brighter) eigenmode."""
        return 0.5 * (self.epsilon + self.gamma * self.epsilon)

    @property
    def n_b(self) -> float:
        """Occupation of the antisymmetric (dimmer) eigenmode."""
        return 0.5 * (self.epsilon - self.gamma * self.epsilon)


@dataclass(frozen=True)
class OnePhotonSector:
    """Total weight and the psi_plus/psi_minus split of the one-photon sector."""

    weight: float
    weight_plus: float
    weight_minus: float


@dataclass(frozen=True)
class TwoPhotonSector:
    """Total weight and the split over the three two-photon eigenstates."""

    weight: float
    weight_sym0: float   # one photon in each eigenmode
    weight_plus: float   # both photons in the brighter eigenmode
    weight_minus: float  # both photons in the dimmer eigenmode


@dataclass(frozen=True)
class PhotonSectorDecomposition:
    p00: float
    one_photon: OnePhotonSector
    two_photon: TwoPhotonSector
    n_a: float
    n_b: float

    @property
    def total_weight(self) -> float:
        return self.p00 + self.one_photon.weight + self.two_photon.weight


@dataclass(frozen=True)
class ParamDerivativeFamily:
    """A state together with its analytic derivatives d(rho)/d(phi), d(rho)/d(gamma)."""

    state: DensityMatrix
    d_phi: np.ndarray
    d_gamma: np.ndarray

    def __post_init__(self):
        for name in ("d_phi", "d_gamma"):
            m = np.asarray(getattr(self, name), dtype=np.complex128)
            object.__setattr__(self, name, m)
            if m.shape != self.state.matrix.shape:
                raise ValueError(f"{name} shape {m.shape} does not match state")
            if not is_hermitian(m, _DERIV_ATOL):
                raise ValueError(f"{name} is not Hermitian to 1e-12")
            if abs(m.trace()) > _DERIV_ATOL:
                raise ValueError(f"{name} is not traceless to 1e-12")


def psi_pm(phi: float, sign: int) -> np.ndarray:
    """Single-photon eigenstate (|01> + sign * e^{i phi} |10>)/sqrt(2)."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    v = np.zeros(4, dtype=np.complex128)
    v[1] = 1.0
    v[2] = sign * np.exp(1j * phi)
    return v / np.sqrt(2.0)


def two_photon_states(phi: float) -> dict[str, np.ndarray]:
    """Two-photon eigenstates in the Fock basis {|20>, |11>, |02>}.

    sym0:  (|20> - e^{-2i phi} |02>)/sqrt(2)
    plus:  (|20> + sqrt(2) e^{-i phi} |11> + e^{-2i phi} |02>)/2
    minus: (|20> - sqrt(2) e^{-i phi} |11> + e^{-2i phi} |02>)/2
    """
    e1 = np.exp(-1j * phi)
    e2 = np.exp(-2j * phi)
    sym0 = np.array([1.0, 0.0, -e2], dtype=np.complex128) / np.sqrt(2.0)
    plus = np.array([1.0, np.sqrt(2.0) * e1, e2], dtype=np.complex128) / 2.0
    minus = np.array([1.0, -np.sqrt(2.0) * e1, e2], dtype=np.complex128) / 2.0
    return {"sym0": sym0, "plus": plus, "minus": minus}


def covariance_matrix(params: SourceParams) -> np.ndarray:
    """4x4 covariance of the two-mode thermal state in basis {a, a^dag, b, b^dag}."""
    eps, gam, phi = params.epsilon, params.gamma, params.phi
    h = 0.5 * eps + 0.5
    c = 0.5 * gam * eps
    ep = np.exp(1j * phi)
    em = np.exp(-1j * phi)
    return np.array(
        [
            [0.0, h, 0.0, c * ep],
            [h, 0.0, c * em, 0.0],
            [0.0, c * em, 0.0, h],
            [c * ep, 0.0, h, 0.0],
        ],
        dtype=np.complex128,
    )


def diagonalize_source(params: SourceParams) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic transform S (phase shifter + 50:50 beamsplitter) and S Sigma S^T.

    The transformed covariance is block anti-diagonal with occupations
    (1 pm gamma) eps/2 + 1/2, i.e. the source splits into two independent
    thermal eigenmodes.
    """
    phi = params.phi
    bs = np.array(
        [
            [1, 0, 1, 0],
            [0, 1, 0, 1],
            [1, 0, -1, 0],
            [0, 1, 0, -1],
        ],
        dtype=np.complex128,
    ) / np.sqrt(2.0)
    phase = np.diag([1.0, 1.0, np.exp(1j * phi), np.exp(-1j * phi)]).astype(np.complex128)
    s = bs @ phase
    sigma_diag = s @ covariance_matrix(params) @ s.T
    return s, sigma_diag


def expected_diagonal_covariance(params: SourceParams) -> np.ndarray:
    """The block form that diagonalize_source must reproduce."""
    da = params.n_a + 0.5
    db = params.n_b + 0.5
    out = np.zeros((4, 4), dtype=np.complex128)
    out[0, 1] = out[1, 0] = da
    out[2, 3] = out[3, 2] = db
    return out


def fock_expansion(params: SourceParams) -> PhotonSectorDecomposition:
    """Photon-sector weights of the thermal source, truncated at two photons.

    The source is a product of two thermal eigenmodes with occupations n_a
    and n_b; sector weights follow the geometric distribution
    p(i, j) = q_a^i q_b^j / ((n_a+1)(n_b+1)) with q = n/(n+1).  The one-photon
    sector splits between psi_plus (q_a) and psi_minus (q_b), approaching the
    (1 pm gamma)/2 split as eps -> 0.  The O(eps^3) remainder beyond two
    photons is reported via the weight deficit, not modeled.
    """
    if not params.epsilon < 0.1:
        raise ValueError(f"fock_expansion requires epsilon < 0.1, got {params.epsilon}")
    n_a, n_b = params.n_a, params.n_b
    norm = (n_a + 1.0) * (n_b + 1.0)
    q_a = n_a / (n_a + 1.0)
    q_b = n_b / (n_b + 1.0)
    p00 = 1.0 / norm
    w_plus = q_a / norm
    w_minus = q_b / norm
    w_sym0 = q_a * q_b / norm
    w_pp = q_a * q_a / norm
    w_mm = q_b * q_b / norm
    return PhotonSectorDecomposition(
        p00=p00,
        one_photon=OnePhotonSector(
            weight=w_plus + w_minus, weight_plus=w_plus, weight_minus=w_minus
        ),
        two_photon=TwoPhotonSector(
            weight=w_sym0 + w_pp + w_mm,
            weight_sym0=w_sym0,
            weight_plus=w_pp,
            weight_minus=w_mm,
        ),
        n_a=n_a,
        n_b=n_b,
    )


def _mixture_and_derivatives(gamma: float, phi: float):
    """The (1 pm gamma)/2 psi_pm mixture on two qubits, with d/dphi and d/dgamma."""
    e_m = np.exp(-1j * phi)
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[1, 1] = rho[2, 2] = 0.5
    rho[1, 2] = 0.5 * gamma * e_m
    rho[2, 1] = np.conj(rho[1, 2])
    d_phi = np.zeros((4, 4), dtype=np.complex128)
    d_phi[1, 2] = -0.5j * gamma * e_m
    d_phi[2, 1] = np.conj(d_phi[1, 2])
    d_gamma = np.zeros((4, 4), dtype=np.complex128)
    d_gamma[1, 2] = 0.5 * e_m
    d_gamma[2, 1] = np.conj(d_gamma[1, 2])
    return rho, d_phi, d_gamma


def conditioned_state(params: SourceParams) -> ParamDerivativeFamily:
    """Post-selected single-photon logical state shared between the sites.

    rho = (1+gamma)/2 |psi_+><psi_+| + (1-gamma)/2 |psi_-><psi_-| on the
    two-qubit space, with analytic derivatives.  <01|rho|10> equals
    gamma e^{-i phi}/2.
    """
    rho, d_phi, d_gamma = _mixture_and_derivatives(params.gamma, params.phi)
    return ParamDerivativeFamily(
        state=DensityMatrix(rho, (2, 2)), d_phi=d_phi, d_gamma=d_gamma
    )


def rho_star(params: SourceParams) -> DensityMatrix:
    """Weak-source optical state truncated at one photon, on the dual-rail space.

    Vacuum weight (1 - eps) plus eps-weighted psi_pm mixture.
    """
    eps = params.epsilon
    if eps > 0.1:
        raise ValueError(f"rho_star assumes eps << 1, got {eps}")
    photon, _, _ = _mixture_and_derivatives(params.gamma, params.phi)
    m = eps * photon
    m[0, 0] += 1.0 - eps
    return DensityMatrix(m, (2, 2))


def rho_star_family(params: SourceParams) -> ParamDerivativeFamily:
    """rho_star together with its analytic phi and gamma derivatives.

    The vacuum component is parameter independent, so the derivatives are the
    eps-weighted derivatives of the photon-sector mixture.
    """
    state = rho_star(params)
    _, d_phi, d_gamma = _mixture_and_derivatives(params.gamma, params.phi)
    return ParamDerivativeFamily(
        state=state, d_phi=params.epsilon * d_phi, d_gamma=params.epsilon * d_gamma
    )


def truncated_fock_state(params: SourceParams) -> np.ndarray:
    """Density matrix of the source on the 9-dim two-mode Fock space {0,1,2}^2.

    Used for moment checks against the covariance matrix; basis ordering is
    |n_A n_B> with n_A the outer factor.
    """
    dec = fock_expansion(params)
    phi = params.phi
    m = np.zeros((9, 9), dtype=np.complex128)

    def outer(vec: np.ndarray) -> np.ndarray:
        return np.outer(vec, vec.conj())

    # vacuum
    m += dec.p00 * outer(ket([0, 0], [3, 3]))
    # one photon: psi_pm on span{|01>, |10>}
    plus = (ket([0, 1], [3, 3]) + np.exp(1j * phi) * ket([1, 0], [3, 3])) / np.sqrt(2.0)
    minus = (ket([0, 1], [3, 3]) - np.exp(1j * phi) * ket([1, 0], [3, 3])) / np.sqrt(2.0)
    m += dec.one_photon.weight_plus * outer(plus)
    m += dec.one_photon.weight_minus * outer(minus)
    # two photons on span{|20>, |11>, |02>}
    basis = [ket([2, 0], [3, 3]), ket([1, 1], [3, 3]), ket([0, 2], [3, 3])]
    states = two_photon_states(phi)
    for name, w in (
        ("sym0", dec.two_photon.weight_sym0),
        ("plus", dec.two_photon.weight_plus),
        ("minus", dec.two_photon.weight_minus),
    ):
        vec = sum(c * b for c, b in zip(states[name], basis))
        m += w * outer(vec)
    return m


def mode_operators_truncated() -> tuple[np.ndarray, np.ndarray]:
    """Annihilation operators (a, b) on the {0,1,2}^2 truncated Fock space."""
    a1 = np.diag(np.sqrt([1.0, 2.0]), k=1).astype(np.complex128)
    eye = np.eye(3, dtype=np.complex128)
    return np.kron(a1, eye), np.kron(eye, a1)
