"""Symmetric-logarithmic-derivative machinery.

QFI and SLD from the eigendecomposition of the state, joint-estimation
compatibility, the quantum Cramer-Rao bound, classical Fisher information of
the local product measurement, and error-propagation variances for explicit
observables.

All reported QFI values are per photon: they refer to the trace-1 conditioned
logical state.  The measurement's adjustable phase acts on the second logical
qubit as e^{i theta}; with that convention the classical Fisher information
saturates the QFI at theta = pi/2 - phi (for phi) and theta = -phi (for
gamma) on the noiseless family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import DensityMatrix, eig_hermitian, is_hermitian
from .source import ParamDerivativeFamily

SLD_CUTOFF = 1e-12


class UnidentifiableParameterError(ValueError):
    """The QFI vanishes: the parameter cannot be estimated from this state."""


class VanishingSensitivityError(ValueError):
    """The observable's mean does not respond to the parameter."""


@dataclass(frozen=True)
class SldResult:
    sld: np.ndarray
    qfi: float
    rank_cutoff_used: float


@dataclass(frozen=True)
class ObservableSpec:
    matrix: np.ndarray
    adjustable_phase: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        if not is_hermitian(m, 1e-10):
            raise ValueError("observable must be Hermitian")


def _deriv(family: ParamDerivativeFamily, which: str) -> np.ndarray:
    if which == "phi":
        return family.d_phi
    if which == "gamma":
        return family.d_gamma
    raise ValueError(f"unknown parameter '{which}' (expected 'phi' or 'gamma')")


def sld_and_qfi(
    family: ParamDerivativeFamily, which: str, cutoff: float = SLD_CUTOFF
) -> SldResult:
    """SLD L and QFI J = Tr(rho L^2) for one parameter.

    In the eigenbasis of rho, L = 2 <m|drho|n> / (p_n + p_m) on every
    eigenvalue pair with p_n + p_m above the cutoff; pairs below the cutoff
    are outside the support and are dropped.
    """
    drho = _deriv(family, which)
    if not is_hermitian(drho, 1e-10):
        raise ValueError("state derivative must be Hermitian")
    eig = eig_hermitian(family.state.matrix)
    p = eig.eigenvalues
    v = eig.eigenvectors
    d = v.conj().T @ drho @ v
    denom = p[:, None] + p[None, :]
    mask = denom > cutoff
    l_eig = np.zeros_like(d)
    l_eig[mask] = 2.0 * d[mask] / denom[mask]
    sld = v @ l_eig @ v.conj().T
    sld = 0.5 * (sld + sld.conj().T)
    # J = sum over supported pairs of 2 |<m|drho|n>|^2 / (p_n + p_m)
    qfi = float(np.real(np.sum(2.0 * np.abs(d[mask]) ** 2 / denom[mask])))
    return SldResult(sld=sld, qfi=qfi, rank_cutoff_used=cutoff)


def qfi_pair(family: ParamDerivativeFamily) -> tuple[float, float]:
    """(QFI_phi, QFI_gamma) of a family."""
    return (
        sld_and_qfi(family, "phi").qfi,
        sld_and_qfi(family, "gamma").qfi,
    )


def compatibility(family: ParamDerivativeFamily) -> complex:
    """Tr(rho [L_phi, L_gamma]), the joint-estimation compatibility scalar.

    Zero (or purely imaginary) by construction; a nonzero value obstructs
    simultaneous saturation of both single-parameter bounds.
    """
    l_phi = sld_and_qfi(family, "phi").sld
    l_gamma = sld_and_qfi(family, "gamma").sld
    comm = l_phi @ l_gamma - l_gamma @ l_phi
    return complex(np.trace(family.state.matrix @ comm))


def crb_variance(qfi: float, n_probes: int) -> float:
    """Cramer-Rao variance floor 1/(N J)."""
    if n_probes < 1:
        raise ValueError("need at least one probe")
    if qfi <= 0.0:
        raise UnidentifiableParameterError(
            "QFI is zero: variance is unbounded (parameter unidentifiable)"
        )
    return 1.0 / (n_probes * qfi)


def _local_basis_vectors(theta: float) -> list[np.ndarray]:
    """Product basis (|0> pm |1>)/sqrt2 (x) (|0> pm e^{i theta}|1>)/sqrt2."""
    out = []
    for s in (+1.0, -1.0):
        u = np.array([1.0, s], dtype=np.complex128) / np.sqrt(2.0)
        for t in (+1.0, -1.0):
            w = np.array([1.0, t * np.exp(1j * theta)], dtype=np.complex128) / np.sqrt(2.0)
            out.append(np.kron(u, w))
    return out


def local_measurement_fi(family: ParamDerivativeFamily, theta: float) -> tuple[float, float]:
    """Classical Fisher information of the 4-outcome local product measurement.

    Returns (fi_phi, fi_gamma).  Outcome probabilities and their analytic
    derivatives come from the family; outcomes with vanishing probability and
    vanishing derivative contribute nothing.
    """
    if family.state.dim != 4:
        raise ValueError("local measurement is defined on the logical two-qubit state")
    fi_phi = 0.0
    fi_gamma = 0.0
    for vec in _local_basis_vectors(theta):
        p = float(np.real(vec.conj() @ family.state.matrix @ vec))
        dp_phi = float(np.real(vec.conj() @ family.d_phi @ vec))
        dp_gamma = float(np.real(vec.conj() @ family.d_gamma @ vec))
        if p > 1e-14:
            fi_phi += dp_phi ** 2 / p
            fi_gamma += dp_gamma ** 2 / p
    return fi_phi, fi_gamma


def error_propagation_variance(
    family: ParamDerivativeFamily, obs: ObservableSpec, which: str
) -> float:
    """(  <X^2> - <X>^2 ) / |d<X>/d theta|^2 for the observable X."""
    x = obs.matrix
    rho = family.state.matrix
    mean = float(np.real(np.trace(rho @ x)))
    second = float(np.real(np.trace(rho @ x @ x)))
    sens = float(np.real(np.trace(_deriv(family, which) @ x)))
    if abs(sens) <= 1e-12:
        raise VanishingSensitivityError(
            f"observable has no sensitivity to {which} at this point"
        )
    return (second - mean ** 2) / sens ** 2


def sld_observable(alpha: float) -> ObservableSpec:
    """Rank-2 optimal phase observable with adjustable phase alpha.

    P has entries e^{i alpha} |01><10| + h.c.; on the conditioned family its
    expectation is gamma cos(alpha + phi) and ||P|| = 1.
    """
    m = np.zeros((4, 4), dtype=np.complex128)
    m[1, 2] = np.exp(1j * alpha)
    m[2, 1] = np.exp(-1j * alpha)
    return ObservableSpec(matrix=m, adjustable_phase=float(alpha))


def separable_observable(alpha: float) -> ObservableSpec:
    """Outcome-sign-product observable of the local product measurement.

    Assigns +1 when the two sites' outcomes agree and -1 when they differ,
    with the adjustable phase on the second site; the expectation on the
    conditioned family is gamma cos(alpha + phi) and ||P_sep|| = 1.
    """
    x0 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    x1 = np.array(
        [[0.0, np.exp(-1j * alpha)], [np.exp(1j * alpha), 0.0]], dtype=np.complex128
    )
    return ObservableSpec(matrix=np.kron(x0, x1), adjustable_phase=float(alpha))


def optimal_estimator(theta_ref: float, sld: SldResult) -> ObservableSpec:
    """Locally unbiased estimator theta I + L/J: mean theta and variance 1/J
    at the reference point."""
    if sld.qfi <= 0.0:
        raise UnidentifiableParameterError("QFI is zero: no unbiased estimator exists")
    dim = sld.sld.shape[0]
    m = theta_ref * np.eye(dim, dtype=np.complex128) + sld.sld / sld.qfi
    return ObservableSpec(matrix=m, adjustable_phase=float(theta_ref))


def adaptive_theta(parameter: str, phi: float) -> float:
    """Adaptive measurement phase: pi/2 - phi for phi, -phi for gamma."""
    if parameter == "phi":
        return 0.5 * np.pi - phi
    if parameter == "gamma":
        return -phi
    raise ValueError(f"unknown parameter '{parameter}'")
