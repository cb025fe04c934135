"""
Closed first-moment dynamics of quadratic Lindblad models.

The drift G satisfies d<x>/dt = G <x> for the Nambu field x = (a, a^dag).
It is obtained from the adjoint (Heisenberg) action of the Hamiltonian and
dissipator on linear operators, which is exact for quadratic H and linear
jumps.  Effective Hamiltonians follow the convention i d<v>/dt = H_eff <v>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import FrameError, NotClosed
from .lindblad import LindbladModel
from .nambu import BogoliubovTransform, commutator_form, diagonalize, swap_blocks

CLOSURE_TOL = 1e-12
FRAME_TOL = 1e-12


@dataclass(frozen=True)
class DriftMatrix:
    m: np.ndarray
    basis: str = "bare"
    frame: Optional[np.ndarray] = None

    def __post_init__(self):
        m = np.array(self.m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("drift matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def n_modes(self) -> int:
        return self.m.shape[0] // 2

    def annihilation_block(self) -> np.ndarray:
        n = self.n_modes
        return self.m[:n, :n]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.m)


@dataclass(frozen=True)
class EffectiveHamiltonian:
    h: np.ndarray
    mode_labels: tuple = ()

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("effective Hamiltonian must be square")
        labels = tuple(self.mode_labels) or tuple(range(h.shape[0]))
        if len(labels) != h.shape[0]:
            raise ValueError("one label per retained mode")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "mode_labels", labels)

    @property
    def dim(self) -> int:
        return self.h.shape[0]


def hamiltonian_generator(model: LindbladModel) -> np.ndarray:
    """Coefficient map c -> i[H, c.x] for the quadratic Hamiltonian."""
    n = model.n_modes
    sw = swap_blocks(n)
    # H = 1/2 x^T Q x + const with x^dag = S x
    q = sw @ model.hamiltonian.nambu_hamiltonian()
    q = 0.5 * (q + q.T)
    return 1j * q @ commutator_form(n)


def dissipator_generator(model: LindbladModel) -> np.ndarray:
    """Coefficient map c -> D^dag(c.x) of the dissipator's adjoint."""
    n = model.n_modes
    sw = swap_blocks(n)
    cf = commutator_form(n)
    out = np.zeros((2 * n, 2 * n), complex)
    for ops, r in model.all_blocks():
        ls = [op.coeffs for op in ops]
        for mu, l_mu in enumerate(ls):
            for nu, l_nu in enumerate(ls):
                rate = r[mu, nu]
                if rate == 0:
                    continue
                # D^dag(X) = R (L_nu^dag [X, L_mu] + [L_nu^dag, X] L_mu)
                l_nu_dag = sw @ l_nu.conj()
                out += rate * (np.outer(l_nu_dag, l_mu) @ cf.T + np.outer(l_mu, l_nu_dag) @ cf)
    return out


def _apply_frame(g: np.ndarray, frame) -> np.ndarray:
    f = np.asarray(frame, dtype=float)
    full = np.concatenate([f, -f])
    mismatch = np.abs(g * (full[:, None] - full[None, :]))
    scale = max(np.linalg.norm(g), 1.0)
    if np.max(mismatch) > FRAME_TOL * scale * max(1.0, np.max(np.abs(f))):
        raise FrameError("rotating frame does not commute with the drift; moments would be time dependent")
    return g + 1j * np.diag(full)


def drift(model: LindbladModel, basis: Optional[str] = None, frame=None,
          transform: Optional[BogoliubovTransform] = None) -> DriftMatrix:
    """First-moment generator of ``model``.

    ``basis`` defaults to the model's basis; ``"dressed"`` expresses the
    moments of b_k = (T x)_k.  ``frame`` (default: the model's frame) gives one
    rotation frequency per mode of the chosen basis.
    """
    basis = basis or model.basis
    frame = model.frame if frame is None else frame
    g = (hamiltonian_generator(model) + dissipator_generator(model)).T
    if basis == "dressed":
        bt = transform or model.transform or diagonalize(model.hamiltonian)
        g = bt.t @ g @ bt.t_inv
    elif basis != "bare":
        raise ValueError(f"unknown basis {basis!r}")
    if frame is not None:
        g = _apply_frame(g, frame)
    return DriftMatrix(g, basis, None if frame is None else np.asarray(frame, float))


def effective_hamiltonian(d: DriftMatrix, modes: Optional[Sequence[int]] = None,
                          labels: Sequence = ()) -> EffectiveHamiltonian:
    """H_eff = i G restricted to annihilation components ``modes``."""
    n = d.n_modes
    modes = list(range(n)) if modes is None else [int(k) for k in modes]
    if not modes or len(set(modes)) != len(modes) or not all(0 <= k < n for k in modes):
        raise ValueError(f"invalid mode subset {modes}")
    rest = [j for j in range(2 * n) if j not in modes]
    leak = np.max(np.abs(d.m[np.ix_(modes, rest)]), initial=0.0)
    if leak > CLOSURE_TOL * np.linalg.norm(d.m):
        raise NotClosed(f"retained modes couple to excluded components (max {leak:.3g})")
    return EffectiveHamiltonian(1j * d.m[np.ix_(modes, modes)], tuple(labels) or tuple(modes))


def propagate(d: DriftMatrix, v0, t: float) -> np.ndarray:
    """exp(G t) v0."""
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    return expm(d.m * t) @ np.asarray(v0, dtype=complex)


def shift_frame(h: EffectiveHamiltonian, f: float) -> EffectiveHamiltonian:
    """Effective Hamiltonian seen from a frame rotating at ``f`` (every eigenvalue moves by -f)."""
    return EffectiveHamiltonian(h.h - f * np.eye(h.dim), h.mode_labels)
