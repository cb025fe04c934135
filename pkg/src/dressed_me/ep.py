"""
Spectral analysis of effective Hamiltonians and exceptional-point scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .moments import EffectiveHamiltonian

CLASS_TOL = 1e-9
COALESCENCE_THRESHOLD = 0.999
DISCRIMINANT_TOL = 1e-12

CLASSES = ("real_spectrum", "imaginary_spectrum", "conjugate_pairs", "anti_conjugate_pairs", "generic")


@dataclass(frozen=True)
class SpectrumPoint:
    param_value: float
    eigenvalues: np.ndarray
    min_gap: float
    coalescence: float
    classification: str


@dataclass(frozen=True)
class EPReport:
    location: float
    refined: bool
    discriminant_residual: float
    symmetry_side_low: str
    symmetry_side_high: str
    coalescence: float = float("nan")


def _as_matrix(h) -> np.ndarray:
    return h.h if isinstance(h, EffectiveHamiltonian) else np.asarray(h, dtype=complex)


def _closed_under(values: np.ndarray, mapped: np.ndarray, tol: float) -> bool:
    """True if ``mapped`` is a permutation of ``values`` within ``tol``."""
    remaining = list(values)
    for m in mapped:
        dist = [abs(m - r) for r in remaining]
        k = int(np.argmin(dist))
        if dist[k] > tol:
            return False
        remaining.pop(k)
    return True


def classify(eigenvalues, tol: float = CLASS_TOL) -> str:
    ev = np.asarray(eigenvalues, dtype=complex)
    scale = max(float(np.max(np.abs(ev))), np.finfo(float).tiny) if ev.size else 1.0
    eps = tol * scale
    if np.all(np.abs(ev.imag) < eps):
        return "real_spectrum"
    if np.all(np.abs(ev.real) < eps):
        return "imaginary_spectrum"
    if _closed_under(ev, ev.conj(), eps):
        return "conjugate_pairs"
    if _closed_under(ev, -ev.conj(), eps):
        return "anti_conjugate_pairs"
    return "generic"


def _coalescence(vecs: np.ndarray) -> float:
    n = vecs.shape[1]
    if n < 2:
        return 0.0
    v = vecs / np.linalg.norm(vecs, axis=0)
    gram = np.abs(v.conj().T @ v)
    np.fill_diagonal(gram, 0.0)
    return float(min(1.0, gram.max()))


def _min_gap(ev: np.ndarray) -> float:
    if ev.size < 2:
        return 0.0
    d = np.abs(ev[:, None] - ev[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def spectrum(h, param_value: float = float("nan"), tol: float = CLASS_TOL) -> SpectrumPoint:
    m = _as_matrix(h)
    ev, vecs = np.linalg.eig(m)
    order = np.lexsort((ev.imag, ev.real))
    ev = ev[order]
    return SpectrumPoint(float(param_value), ev, _min_gap(ev), _coalescence(vecs[:, order]),
                         classify(ev, tol))


def discriminant(h) -> complex:
    """(h11 - h22)^2 / 4 + h12 h21; zero exactly where a 2x2 matrix is degenerate."""
    m = _as_matrix(h)
    if m.shape != (2, 2):
        raise ValueError("discriminant is defined for 2x2 matrices")
    return complex((m[0, 0] - m[1, 1]) ** 2 / 4 + m[0, 1] * m[1, 0])


Family = Callable[[float], object]


def _refine(family: Family, lo: float, hi: float, guess: float):
    """Return (location, residual, refined) inside [lo, hi]."""
    m0 = _as_matrix(family(guess))
    scale = max(float(np.max(np.abs(m0))), np.finfo(float).tiny)
    xtol = 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)

    if m0.shape == (2, 2):
        def d_of(p):
            return discriminant(family(p))

        d_lo, d_hi = d_of(lo), d_of(hi)
        mostly_real = all(abs(d.imag) <= 1e-9 * abs(d) + 1e-14 * scale ** 2 for d in (d_lo, d_hi, d_of(guess)))
        loc = None
        if mostly_real and np.sign(d_lo.real) != np.sign(d_hi.real):
            loc = brentq(lambda p: d_of(p).real, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
        if loc is None:
            res = minimize_scalar(lambda p: abs(d_of(p)), bounds=(lo, hi), method="bounded",
                                  options={"xatol": xtol, "maxiter": 500})
            loc = float(res.x)
        resid = abs(d_of(loc))
        return float(loc), resid, resid < DISCRIMINANT_TOL * scale ** 2

    def objective(p):
        pt = spectrum(family(p))
        return pt.min_gap * (1.0 - pt.coalescence)

    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": xtol, "maxiter": 500})
    loc = float(res.x)
    resid = objective(loc)
    return loc, resid, resid < 1e-6 * scale


def ep_scan(family: Family, lo: float, hi: float, n_points: int,
            threshold: float = COALESCENCE_THRESHOLD) -> tuple[list[SpectrumPoint], list[EPReport]]:
    """Sweep ``family`` over [lo, hi] and locate exceptional points.

    Grid points where the minimum eigenvalue gap has a local minimum are
    refined inside the neighbouring grid interval.  A candidate is reported
    when the eigenvector coalescence at the refined location exceeds
    ``threshold``; on a finite grid the overlap at the nearest grid point only
    approaches one linearly in the distance to the EP, so the test is applied
    after refinement.
    """
    if n_points < 3:
        raise ValueError("ep_scan needs at least three points")
    grid = np.linspace(lo, hi, n_points)
    points = [spectrum(family(p), p) for p in grid]
    gaps = np.array([p.min_gap for p in points])
    reports: list[EPReport] = []
    step = grid[1] - grid[0]
    for i in range(1, n_points - 1):
        if not (gaps[i] <= gaps[i - 1] and gaps[i] <= gaps[i + 1]):
            continue
        if gaps[i] == gaps[i - 1] == gaps[i + 1]:
            continue
        a, b = grid[i - 1], grid[i + 1]
        try:
            loc, resid, ok = _refine(family, a, b, grid[i])
        except (ValueError, RuntimeError, np.linalg.LinAlgError):
            loc, resid, ok = float(grid[i]), float("inf"), False
        at = spectrum(family(loc), loc)
        if at.coalescence <= threshold and points[i].coalescence <= threshold:
            continue
        side_lo = spectrum(family(max(lo, loc - step / 2))).classification
        side_hi = spectrum(family(min(hi, loc + step / 2))).classification
        reports.append(EPReport(loc, bool(ok), float(resid), side_lo, side_hi, at.coalescence))
    return points, reports


# ---------------------------------------------------------------------------
# closed-form conditions for the three-mode system at epsilon = 2 Delta'


def _delta_g_sq(g: float, delta_prime: float) -> float:
    return delta_prime ** 2 + 2 * g ** 2


def kappa(g: float, delta_prime: float, gamma1: float, gamma3: float) -> float:
    return delta_prime ** 2 * (g ** 2 + gamma1 * gamma3) + g ** 2 * (2 * g ** 2 + gamma1 ** 2 + gamma1 * gamma3)


def chi(g: float, delta_prime: float, gamma1: float, gamma3: float) -> float:
    return g ** 2 * (_delta_g_sq(g, delta_prime) + gamma1 ** 2 - gamma1 * gamma3)


def ep_conditions_three_mode(g: float, delta_prime: float, gamma1: float, gamma3: float) -> dict:
    """Residuals whose zeros mark the anti-PT (|chi| = G3 D' Dg^2) and PT (kappa = 0) EPs."""
    if delta_prime <= 0:
        raise ValueError("Delta' must be positive")
    a = gamma3 * delta_prime * _delta_g_sq(g, delta_prime)
    return {
        "anti_pt_residual": abs(chi(g, delta_prime, gamma1, gamma3)) - a,
        "pt_residual": kappa(g, delta_prime, gamma1, gamma3),
        "chi": chi(g, delta_prime, gamma1, gamma3),
        "kappa": kappa(g, delta_prime, gamma1, gamma3),
        "diagonal": a,
    }


def anti_pt_gamma1(g: float, delta_prime: float, gamma3: float) -> float:
    """Smallest positive Gamma_1 with chi = -Gamma_3 Delta' Delta_g^2 (exact root)."""
    dg2 = _delta_g_sq(g, delta_prime)
    c = dg2 + gamma3 * delta_prime * dg2 / g ** 2
    disc = gamma3 ** 2 - 4 * c
    if disc < 0:
        raise ValueError("no anti-PT exceptional point for these parameters")
    # numerically stable small root of x^2 - G3 x + c = 0
    return 2 * c / (gamma3 + np.sqrt(disc))


def anti_pt_gamma1_approx(g: float, delta_prime: float) -> float:
    """Large-Gamma_3 limit Delta'(Delta'^2 + 2 g^2) / g^2."""
    return delta_prime * _delta_g_sq(g, delta_prime) / g ** 2


def kappa_zero_gamma3(g: float, delta_prime: float, gamma1: float) -> float:
    """Gamma_3 on the kappa = 0 locus (requires Gamma_1 < 0)."""
    if gamma1 >= 0:
        raise ValueError("kappa = 0 needs gain on the slow modes (Gamma_1 < 0)")
    return g ** 2 * (2 * g ** 2 + delta_prime ** 2 + gamma1 ** 2) / ((g ** 2 + delta_prime ** 2) * abs(gamma1))


def pt_ep_on_kappa_locus(g: float, delta_prime: float) -> tuple[float, float]:
    """(Gamma_1, Gamma_3) where |chi| = Gamma_3 Delta' Delta_g^2 on the kappa = 0 locus."""
    return -delta_prime, 2 * g ** 2 / delta_prime
