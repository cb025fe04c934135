"""
Adiabatic elimination of fast modes from a first-moment drift.

Setting d<v_f>/dt = 0 gives <v_f> = -G_ff^{-1} G_fs <v_s>, and the slow modes
then evolve with the Schur complement G_ss - G_sf G_ff^{-1} G_fs.
"""

from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .errors import SingularFastBlock
from .moments import DriftMatrix, EffectiveHamiltonian
from .nambu import BogoliubovTransform

COND_LIMIT = 1e8
SINGULAR_RTOL = 1e-12   # smallest fast-block singular value relative to the slow-block scale
SEPARATION_WARN = 10.0


class WeakSeparationWarning(UserWarning):
    """Fast and slow timescales are separated by less than a factor of ten."""


def _split(d: DriftMatrix, fast: Sequence[int], slow: Sequence[int] | None):
    """Annihilation-block indices for (slow, fast)."""
    n = d.n_modes
    fast = [int(k) for k in fast]
    if len(set(fast)) != len(fast) or not all(0 <= k < n for k in fast):
        raise ValueError(f"invalid fast-mode subset {fast}")
    if slow is None:
        slow = [k for k in range(n) if k not in fast]
    slow = [int(k) for k in slow]
    if set(slow) & set(fast) or not all(0 <= k < n for k in slow):
        raise ValueError("slow and fast subsets must be disjoint and in range")
    if not slow:
        raise ValueError("at least one slow mode must remain")
    return slow, fast


def _block(d: DriftMatrix, rows, cols) -> np.ndarray:
    return d.m[np.ix_(rows, cols)]


def eliminate(d: DriftMatrix, fast: Sequence[int], slow: Sequence[int] | None = None,
              scale_by_determinant: bool = False, check_separation: bool = True) -> EffectiveHamiltonian:
    """Effective Hamiltonian i(G_ss - G_sf G_ff^{-1} G_fs) on the slow modes.

    Works on the annihilation block of ``d`` (closed for every number-
    conserving or dressed-diagonal drift).  With ``scale_by_determinant`` the
    result is multiplied by det(G_ff), using the adjugate instead of the
    inverse, so it stays finite where the fast block is singular.
    """
    slow, fast = _split(d, fast, slow)
    g_ss = _block(d, slow, slow)
    if not fast:
        return EffectiveHamiltonian(1j * g_ss, tuple(slow))
    g_ff = _block(d, fast, fast)
    g_fs = _block(d, fast, slow)
    g_sf = _block(d, slow, fast)

    if scale_by_determinant:
        det = np.linalg.det(g_ff)
        adj = _adjugate(g_ff)
        return EffectiveHamiltonian(1j * (det * g_ss - g_sf @ adj @ g_fs), tuple(slow))

    cond = np.linalg.cond(g_ff)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularFastBlock(f"fast block condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    # a scalar block always has condition number one, so also compare its
    # size with the rest of the drift
    smallest = np.linalg.svd(g_ff, compute_uv=False).min()
    scale = max(np.abs(g_ss).max(), np.abs(g_sf).max(), np.abs(g_fs).max())
    if smallest <= SINGULAR_RTOL * scale:
        raise SingularFastBlock(f"fast block singular value {smallest:.3g} is negligible against {scale:.3g}")
    if check_separation:
        fast_rate = np.min(np.abs(np.linalg.eigvals(g_ff).real))
        slow_scale = np.max(np.abs(np.linalg.eigvals(g_ss)))
        if fast_rate < SEPARATION_WARN * slow_scale:
            warnings.warn(
                f"fast decay {fast_rate:.3g} is less than {SEPARATION_WARN:g}x the slow scale {slow_scale:.3g}",
                WeakSeparationWarning, stacklevel=2)
    reduced = g_ss - g_sf @ np.linalg.solve(g_ff, g_fs)
    return EffectiveHamiltonian(1j * reduced, tuple(slow))


def _adjugate(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=m.dtype)
    adj = np.empty_like(m)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, j, axis=0), i, axis=1)
            adj[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def fast_block_determinant(d: DriftMatrix, fast: Sequence[int]) -> complex:
    fast = [int(k) for k in fast]
    return complex(np.linalg.det(_block(d, fast, fast)))


def elimination_error_estimate(d: DriftMatrix, fast: Sequence[int], t_horizon: float,
                               n_samples: int = 50, slow: Sequence[int] | None = None) -> float:
    """Max deviation of slow-mode trajectories, full versus reduced dynamics.

    Each slow unit vector is propagated with the full annihilation-block drift
    (fast modes starting at their adiabatic value) and with the reduced
    generator; the largest absolute difference over the horizon is returned.
    """
    slow, fast = _split(d, fast, slow)
    if not fast:
        return 0.0
    idx = slow + fast
    g = _block(d, idx, idx)
    h = eliminate(d, fast, slow, check_separation=False).h
    g_red = -1j * h
    lift = -np.linalg.solve(_block(d, fast, fast), _block(d, fast, slow))
    ns = len(slow)
    worst = 0.0
    for t in np.linspace(0.0, t_horizon, n_samples + 1)[1:]:
        full = expm(g * t)
        red = expm(g_red * t)
        for j in range(ns):
            v0 = np.concatenate([np.eye(ns)[j], lift[:, j]])
            worst = max(worst, float(np.max(np.abs((full @ v0)[:ns] - red[:, j]))))
    return worst


def approximate_three_mode_transform(g: float, delta_prime: float) -> np.ndarray:
    """First-order mode rotation for two modes detuned by Delta' from a third.

    Rows give (b_1, b_2, b_3) in terms of (a_1, a_2, a_3); every off-diagonal
    entry has magnitude g / Delta'.
    """
    e = g / delta_prime
    return np.array([[1.0, e, e], [-e, 1.0, e], [-e, -e, 1.0]])


def compare_three_mode_transform(bt: BogoliubovTransform, g: float, delta_prime: float,
                                 order: Sequence[int] = (0, 1, 2)) -> dict:
    """Entrywise magnitude comparison of the exact and first-order rotations.

    ``order[k]`` is the dressed index matched to bare mode k.  Signs depend on
    phase conventions, so magnitudes are compared.  Entries coupling to mode 3
    and the (1,2)/(2,1) pair are reported separately, with the (g/Delta')^2
    bound expected for a first-order expansion.
    """
    n = bt.n_modes
    if n != 3:
        raise ValueError("three-mode comparison needs exactly three modes")
    mu = np.abs(bt.t[:n, :n][list(order)])
    diff = np.abs(mu - np.abs(approximate_three_mode_transform(g, delta_prime)))
    mode3 = [(0, 2), (1, 2), (2, 0), (2, 1), (0, 0), (1, 1), (2, 2)]
    return {
        "mode3_entries": float(max(diff[i, j] for i, j in mode3)),
        "cross_12": float(max(diff[0, 1], diff[1, 0])),
        "bound": (g / delta_prime) ** 2,
    }
