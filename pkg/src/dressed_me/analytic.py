"""
Closed-form drifts and effective Hamiltonians used as reference families.

Each builder returns the object for one parameter value; ``families`` maps a
name to a constructor that binds the fixed parameters and leaves one free.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .moments import DriftMatrix, EffectiveHamiltonian, shift_frame
from .reduction import eliminate


def _nambu_drift(g_block: np.ndarray) -> DriftMatrix:
    """Number-conserving drift: the creation block is the conjugate copy."""
    n = g_block.shape[0]
    z = np.zeros((n, n), complex)
    return DriftMatrix(np.block([[g_block, z], [z, g_block.conj()]]))


def textbook(omega: float, gamma: float, g: float, omega2: float | None = None,
             gamma2: float | None = None) -> EffectiveHamiltonian:
    """Loss gamma on mode 1, gain gamma2 on mode 2, coupling g."""
    omega2 = omega if omega2 is None else omega2
    gamma2 = gamma if gamma2 is None else gamma2
    return EffectiveHamiltonian(np.array([[omega - 1j * gamma, g], [g, omega2 + 1j * gamma2]]))


def textbook_eigenvalues(omega: float, gamma: float, g: float) -> np.ndarray:
    root = np.sqrt(complex(g ** 2 - gamma ** 2))
    return np.array([omega - root, omega + root])


def pairing_w(omega: float, g: float) -> float:
    return omega / np.sqrt(omega ** 2 - g ** 2)


def pairing_w_pm(omega: float, g: float) -> tuple[float, float]:
    root = np.sqrt(omega ** 2 - g ** 2)
    return np.sqrt(omega / (2 * root) + 0.5), -np.sqrt(omega / (2 * root) - 0.5)


def pairing_eigenvalues(omega: float, g: float, lam_plus: float, lam_minus: float) -> np.ndarray:
    """Dressed-frame eigenvalues with lam_plus = loss + gain, lam_minus = loss - gain."""
    w = pairing_w(omega, g)
    root = np.sqrt(lam_plus ** 2 + (w ** 2 - 1) * lam_minus ** 2)
    return np.array([-0.5j * (w * lam_minus + root), -0.5j * (w * lam_minus - root)])


def perturbative_loss_matrix(g: float, delta_prime: float, gamma1: float, gamma3: float) -> np.ndarray:
    """Dissipative coupling matrix of the perturbative three-mode drift."""
    r = g / delta_prime
    ups = gamma1 + r ** 2 * (2 * gamma1 + gamma3)
    off = r ** 2 * (gamma3 - gamma1)
    c = r * (gamma1 - gamma3)
    return np.array([[ups, off, c], [off, ups, c], [c, c, gamma3]], dtype=complex)


def perturbative_drift(g: float, delta_prime: float, gamma1: float, gamma3: float,
                       epsilon: float) -> DriftMatrix:
    """Three-mode drift in the frame of mode 3: -Lambda - i diag(D', D' - eps, 0)."""
    lam = perturbative_loss_matrix(g, delta_prime, gamma1, gamma3)
    freqs = np.array([delta_prime, delta_prime - epsilon, 0.0])
    return _nambu_drift(-lam - 1j * np.diag(freqs))


def perturbative_reduced(g: float, delta_prime: float, gamma1: float, gamma3: float,
                         epsilon: float) -> EffectiveHamiltonian:
    """Mode 3 eliminated, then shifted to the frame rotating at D' - eps/2."""
    h = eliminate(perturbative_drift(g, delta_prime, gamma1, gamma3, epsilon), fast=[2],
                  check_separation=False)
    return shift_frame(h, delta_prime - epsilon / 2)


def simplified_reduced(g: float, delta_prime: float, gamma1: float, epsilon: float) -> EffectiveHamiltonian:
    c = g ** 2 * gamma1 / delta_prime ** 2
    return EffectiveHamiltonian(1j * np.array([[-gamma1 - 0.5j * epsilon, -c], [-c, -gamma1 + 0.5j * epsilon]]))


def simplified_ep(g: float, delta_prime: float, gamma1: float) -> float:
    return 2 * g ** 2 * gamma1 / delta_prime ** 2


def perturbative_ep(g: float, delta_prime: float, gamma1: float, gamma3: float) -> float:
    """Exact EP of the eliminated perturbative drift."""
    return 2 * g ** 2 * gamma1 * (gamma3 - gamma1) / (delta_prime ** 2 * gamma3)


def three_mode_frame_hamiltonian(g: float, delta_prime: float, epsilon: float) -> np.ndarray:
    return np.array([[delta_prime, 0.0, g], [0.0, delta_prime - epsilon, g], [g, g, 0.0]])


def exact_regime_drift(g: float, delta_prime: float, gamma1: float, gamma3: float) -> DriftMatrix:
    """Drift at eps = 2 D' with rates (G1, G1, G3) on the dressed modes (G3 on the Omega = 0 mode)."""
    h = three_mode_frame_hamiltonian(g, delta_prime, 2 * delta_prime)
    w, u = np.linalg.eigh(h)
    # eigenvalues -Delta_g, 0, +Delta_g; the zero mode gets Gamma_3
    rates = np.array([gamma1, gamma3, gamma1])
    return _nambu_drift(-1j * h - u @ np.diag(rates) @ u.T)


def exact_regime_reduced(g: float, delta_prime: float, gamma1: float, gamma3: float,
                         scale_by_determinant: bool = False) -> EffectiveHamiltonian:
    return eliminate(exact_regime_drift(g, delta_prime, gamma1, gamma3), fast=[2],
                     scale_by_determinant=scale_by_determinant, check_separation=False)


def exact_regime_scaled(g: float, delta_prime: float, gamma1: float, gamma3: float) -> np.ndarray:
    """Reduced Hamiltonian times (D'^2 G3 + 2 g^2 G1), with G3 on the diagonal term."""
    from .ep import chi, kappa

    dg2 = delta_prime ** 2 + 2 * g ** 2
    a = gamma3 * delta_prime * dg2
    k = kappa(g, delta_prime, gamma1, gamma3)
    c = chi(g, delta_prime, gamma1, gamma3)
    return np.array([[a - 1j * k, -1j * c], [-1j * c, -a - 1j * k]])


def exact_regime_denominator(g: float, delta_prime: float, gamma1: float, gamma3: float) -> float:
    return delta_prime ** 2 * gamma3 + 2 * g ** 2 * gamma1


FAMILIES: dict[str, Callable[..., Callable[[float], object]]] = {
    "textbook": lambda omega, gamma: (lambda g: textbook(omega, gamma, g)),
    "perturbative_reduced": lambda g, delta_prime, gamma1, gamma3: (
        lambda eps: perturbative_reduced(g, delta_prime, gamma1, gamma3, eps)),
    "perturbative_simplified": lambda g, delta_prime, gamma1: (
        lambda eps: simplified_reduced(g, delta_prime, gamma1, eps)),
    "exact_anti_pt": lambda g, delta_prime, gamma3: (
        lambda gamma1: exact_regime_reduced(g, delta_prime, gamma1, gamma3)),
    "exact_pt_locus": lambda g, delta_prime: (
        lambda gamma1: exact_regime_reduced(g, delta_prime, gamma1, _kappa_zero(g, delta_prime, gamma1),
                                            scale_by_determinant=True)),
}


def _kappa_zero(g, delta_prime, gamma1):
    from .ep import kappa_zero_gamma3
    return kappa_zero_gamma3(g, delta_prime, gamma1)


def family(name: str, **params) -> Callable[[float], object]:
    if name not in FAMILIES:
        raise KeyError(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    return FAMILIES[name](**params)
