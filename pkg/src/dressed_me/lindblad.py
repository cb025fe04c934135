"""
Lindblad models for quadratic systems: local, global (dressed) and
degenerate-eigenspace constructions.

Every jump operator is a NambuVector over the *bare* field, whatever the
builder.  Dissipators use the convention

    D[rho] = sum_{mu,nu} R_{mu nu} (2 L_mu rho L_nu^dag - {L_nu^dag L_mu, rho})

so a single jump ``(a, gamma)`` damps <a> at amplitude rate gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bath import (
    BathSpec,
    check_baths,
    coupling_weights,
    lambda_rate,
    occupation,
    rate_pair,
    spectral_density,
)
from .errors import DegenerateSpectrum, UnsupportedLambShift
from .nambu import BogoliubovTransform, NambuVector, QuadraticSystem, diagonalize

PSD_TOL = 1e-10
PRUNE_REL = 1e-14


@dataclass(frozen=True)
class JumpTerm:
    op: NambuVector
    rate: float

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"jump rate must be non-negative, got {self.rate}")


@dataclass(frozen=True)
class CrossJumpBlock:
    """Jumps sharing one Hermitian PSD rate matrix (cross terms between ops)."""

    ops: tuple
    rate_matrix: np.ndarray

    def __post_init__(self):
        ops = tuple(self.ops)
        r = np.array(self.rate_matrix, dtype=complex)
        if r.shape != (len(ops), len(ops)):
            raise ValueError("rate matrix shape does not match number of operators")
        scale = max(1.0, float(np.max(np.abs(r)))) if r.size else 1.0
        if np.max(np.abs(r - r.conj().T), initial=0.0) > PSD_TOL * scale:
            raise ValueError("rate matrix is not Hermitian")
        r = 0.5 * (r + r.conj().T)
        if r.size and np.linalg.eigvalsh(r)[0] < -PSD_TOL * scale:
            raise ValueError("rate matrix is not positive semidefinite")
        r.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "rate_matrix", r)


@dataclass(frozen=True)
class LindbladModel:
    hamiltonian: QuadraticSystem
    jumps: tuple = ()
    cross_blocks: tuple = ()
    basis: str = "bare"
    frame: Optional[np.ndarray] = None
    transform: Optional[BogoliubovTransform] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n2 = 2 * self.hamiltonian.n_modes
        object.__setattr__(self, "jumps", tuple(self.jumps))
        object.__setattr__(self, "cross_blocks", tuple(self.cross_blocks))
        for j in self.jumps:
            if j.op.coeffs.size != n2:
                raise ValueError("jump operator dimension mismatch")
        for blk in self.cross_blocks:
            if any(op.coeffs.size != n2 for op in blk.ops):
                raise ValueError("cross-block operator dimension mismatch")
        if self.basis not in ("bare", "dressed"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.frame is not None:
            f = np.asarray(self.frame, dtype=float)
            if f.shape != (self.hamiltonian.n_modes,):
                raise ValueError("frame must give one frequency per mode")
            f.setflags(write=False)
            object.__setattr__(self, "frame", f)

    @property
    def n_modes(self) -> int:
        return self.hamiltonian.n_modes

    def all_blocks(self) -> list[tuple[list[NambuVector], np.ndarray]]:
        """Jumps and cross blocks as a uniform list of (ops, rate matrix)."""
        out = [([j.op], np.array([[j.rate]], dtype=complex)) for j in self.jumps]
        out += [(list(b.ops), b.rate_matrix) for b in self.cross_blocks]
        return out

    def max_rate(self) -> float:
        rates = [j.rate for j in self.jumps]
        rates += [float(np.max(np.linalg.eigvalsh(b.rate_matrix))) for b in self.cross_blocks]
        return max(rates, default=0.0)


def _prune(jumps: list[JumpTerm]) -> list[JumpTerm]:
    if not jumps:
        return jumps
    top = max(j.rate for j in jumps)
    return [j for j in jumps if j.rate > PRUNE_REL * top]


def _require_wideband(baths: Sequence[BathSpec], neglect_lamb_shift: bool) -> None:
    if neglect_lamb_shift:
        return
    for b in baths:
        if not b.is_flat:
            raise UnsupportedLambShift(
                f"bath on mode {b.mode} is not flat; its Lamb shift is not modelled "
                "(pass neglect_lamb_shift=True to drop it explicitly)")


def build_local(sys: QuadraticSystem, baths: Sequence[BathSpec] = (), frame=None) -> LindbladModel:
    """Jumps on bare a_k, a_k^dag with rates evaluated at bare frequencies."""
    check_baths(baths, sys.n_modes)
    n = sys.n_modes
    jumps = []
    for b in baths:
        if b.attach != "bare":
            raise ValueError("the local construction only accepts baths on bare modes")
        w = float(sys.omega[b.mode])
        loss = lambda_rate(b, w)
        gain = spectral_density(b, w) * occupation(b, w)
        if loss > 0:
            jumps.append(JumpTerm(NambuVector.annihilator(n, b.mode), loss))
        if gain > 0:
            jumps.append(JumpTerm(NambuVector.creator(n, b.mode), gain))
    return LindbladModel(sys, _prune(jumps), (), "bare", frame)


def _check_nondegenerate(bt: BogoliubovTransform) -> None:
    if any(len(g) > 1 for g in bt.groups):
        raise DegenerateSpectrum(
            f"dressed frequencies {bt.dressed_freq} are degenerate; use build_global_degenerate")


def build_global(sys: QuadraticSystem, baths: Sequence[BathSpec] = (), frame=None,
                 neglect_lamb_shift: bool = False) -> LindbladModel:
    """Dressed-mode jumps b_k, b_k^dag with rates at the dressed frequencies."""
    check_baths(baths, sys.n_modes)
    _require_wideband(baths, neglect_lamb_shift)
    bt = diagonalize(sys)
    _check_nondegenerate(bt)
    n = sys.n_modes
    loss = np.zeros(n)
    gain = np.zeros(n)
    for b in baths:
        for k in range(n):
            lo, ga = rate_pair(b, bt, k)
            loss[k] += lo
            gain[k] += ga
    jumps = []
    for k in range(n):
        if loss[k] > 0:
            jumps.append(JumpTerm(bt.dressed_operator(k), float(loss[k])))
        if gain[k] > 0:
            jumps.append(JumpTerm(bt.dressed_creator(k), float(gain[k])))
    return LindbladModel(sys, _prune(jumps), (), "dressed", frame, bt)


def build_global_degenerate(sys: QuadraticSystem, baths: Sequence[BathSpec] = (),
                            frame=None) -> LindbladModel:
    """Wide-band dressed master equation keeping cross terms inside eigenspaces.

    For bath n and eigenspace iota the coupling operator projects onto
    X = sum_mu phi_{n,mu} b_mu, giving the rate matrix lambda(Omega) phi phi^dag
    on (b_mu) and lambda(-Omega) phi^* phi^T on (b_mu^dag).
    """
    check_baths(baths, sys.n_modes)
    _require_wideband(baths, False)
    bt = diagonalize(sys)
    jumps: list[JumpTerm] = []
    blocks: list[CrossJumpBlock] = []
    for grp in bt.groups:
        idx = list(grp)
        omega = float(bt.dressed_freq[idx[0]])
        r_loss = np.zeros((len(idx), len(idx)), complex)
        r_gain = np.zeros((len(idx), len(idx)), complex)
        for b in baths:
            phi = coupling_weights(b, bt)[idx]
            r_loss += lambda_rate(b, omega) * np.outer(phi, phi.conj())
            r_gain += lambda_rate(b, -omega) * np.outer(phi.conj(), phi)
        lowers = [bt.dressed_operator(k) for k in idx]
        raisers = [bt.dressed_creator(k) for k in idx]
        for ops, r in ((lowers, r_loss), (raisers, r_gain)):
            if len(idx) == 1:
                if r[0, 0].real > 0:
                    jumps.append(JumpTerm(ops[0], float(r[0, 0].real)))
            elif np.max(np.abs(r)) > 0:
                blocks.append(CrossJumpBlock(tuple(ops), r))
    jumps = _prune(jumps)
    return LindbladModel(sys, jumps, blocks, "dressed", frame, bt)


BUILDERS = {
    "local": build_local,
    "global": build_global,
    "global_degenerate": build_global_degenerate,
}


def build(kind: str, sys: QuadraticSystem, baths: Sequence[BathSpec] = (), frame=None) -> LindbladModel:
    """Dispatch by name; ``"global"`` falls back to the degenerate builder when needed."""
    if kind == "global":
        try:
            return build_global(sys, baths, frame)
        except DegenerateSpectrum:
            return build_global_degenerate(sys, baths, frame)
    if kind not in BUILDERS:
        raise ValueError(f"unknown master equation {kind!r}")
    return BUILDERS[kind](sys, baths, frame)
