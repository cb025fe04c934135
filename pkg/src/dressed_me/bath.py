"""
Thermal baths attached to system modes: occupations, spectral densities and
the dressed-mode rates they induce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import expit

from .errors import (
    DivergentOccupation,
    NonPositiveFrequency,
    ZeroFrequencyUnsupported,
)
from .nambu import BogoliubovTransform, phi_coefficients

ZETA = {"bose": -1, "fermi": +1}


@dataclass(frozen=True)
class FlatDensity:
    """Wide-band bath, J(omega) = value."""

    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("flat spectral density must be non-negative")


@dataclass(frozen=True)
class OhmicDensity:
    """J(omega) = pi * alpha * omega * exp(-omega / cutoff)."""

    alpha: float
    cutoff: float

    def __post_init__(self):
        if self.alpha < 0 or self.cutoff <= 0:
            raise ValueError("ohmic density needs alpha >= 0 and cutoff > 0")


SpectralDensity = Union[FlatDensity, OhmicDensity]


@dataclass(frozen=True)
class BathSpec:
    """One thermal bath coupled through a_n + a_n^dag.

    ``attach="dressed"`` couples the bath directly to dressed mode ``mode``
    (weight one on b_k, zero elsewhere) instead of the bare mode.
    """

    mode: int
    statistics: str = "bose"
    temperature: float = 0.0
    chemical_potential: float = 0.0
    spectral_density: SpectralDensity = FlatDensity(0.0)
    attach: str = "bare"

    def __post_init__(self):
        if self.statistics not in ZETA:
            raise ValueError(f"unknown statistics {self.statistics!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.attach not in ("bare", "dressed"):
            raise ValueError(f"unknown attachment {self.attach!r}")

    @property
    def zeta(self) -> int:
        return ZETA[self.statistics]

    @property
    def is_flat(self) -> bool:
        return isinstance(self.spectral_density, FlatDensity)


def check_baths(baths: Sequence[BathSpec], n_modes: int) -> None:
    seen = set()
    for b in baths:
        if not 0 <= b.mode < n_modes:
            raise ValueError(f"bath mode {b.mode} out of range")
        key = (b.attach, b.mode)
        if key in seen:
            raise ValueError(f"more than one bath on {b.attach} mode {b.mode}")
        seen.add(key)


def occupation(b: BathSpec, eps: float) -> float:
    """f(eps) = 1 / (zeta + exp((eps - eta) / T))."""
    eta, temp = b.chemical_potential, b.temperature
    if b.statistics == "fermi":
        if temp == 0:
            if eps < eta:
                return 1.0
            return 0.5 if eps == eta else 0.0
        return float(expit(-(eps - eta) / temp))
    if eps <= eta:
        raise DivergentOccupation(f"bose occupation diverges for eps={eps} <= eta={eta}")
    if temp == 0:
        return 0.0
    x = (eps - eta) / temp
    return 0.0 if x > 745 else 1.0 / math.expm1(x)


def _density(sd: SpectralDensity, omega: float) -> float:
    if isinstance(sd, FlatDensity):
        return float(sd.value)
    return float(np.pi * sd.alpha * omega * np.exp(-omega / sd.cutoff))


def spectral_density(b: BathSpec, omega: float) -> float:
    if omega <= 0:
        raise NonPositiveFrequency(f"spectral density needs omega > 0, got {omega}")
    return _density(b.spectral_density, omega)


def lambda_rate(b: BathSpec, omega: float) -> float:
    """Bath correlation factor for a transition at frequency omega.

    Positive omega is emission into the bath, negative omega absorption.
    """
    if omega > 0:
        return spectral_density(b, omega) * (1.0 - b.zeta * occupation(b, omega))
    if omega < 0:
        return spectral_density(b, -omega) * occupation(b, -omega)
    return _density(b.spectral_density, 0.0) * (1.0 + (1 - b.zeta) * occupation(b, 0.0))


def coupling_weights(b: BathSpec, bt: BogoliubovTransform) -> np.ndarray:
    """phi_{n,k} for every dressed mode k."""
    if b.attach == "dressed":
        w = np.zeros(bt.n_modes, complex)
        w[b.mode] = 1.0
        return w
    return phi_coefficients(bt, b.mode)


def rate_pair(b: BathSpec, bt: BogoliubovTransform, k: int) -> tuple[float, float]:
    """(loss, gain) rates of dressed mode k, i.e. the L(b_k) and L(b_k^dag) weights."""
    omega = float(bt.dressed_freq[k])
    if omega == 0:
        raise ZeroFrequencyUnsupported("zero dressed frequency")
    weight = abs(coupling_weights(b, bt)[k]) ** 2
    if weight == 0:
        return 0.0, 0.0
    return weight * lambda_rate(b, omega), weight * lambda_rate(b, -omega)


def total_rate(baths: Sequence[BathSpec], bt: BogoliubovTransform, k: int) -> float:
    """Net amplitude damping rate of dressed mode k (negative means gain)."""
    if not 0 <= k < bt.n_modes:
        raise IndexError(f"dressed index {k} out of range")
    total = 0.0
    for b in baths:
        loss, gain = rate_pair(b, bt, k)
        total += loss - gain
    return total
