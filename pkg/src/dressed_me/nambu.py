"""
Nambu-space representation of quadratic bosonic Hamiltonians.

The Hamiltonian handled here is

    H = sum_n omega_n a_n^dag a_n + (chi_n / 2 a_n^2 + h.c.)
      + sum_{i<j} (g_ij a_i a_j + lam_ij a_i a_j^dag + h.c.)

and operators linear in the mode operators are stored as coefficient vectors
over the Nambu field (a_1, ..., a_N, a_1^dag, ..., a_N^dag).

Conventions
-----------
Rows of the canonical matrix ``t`` are the dressed operators,
``b_k = sum_i t[k, i] x_i``.  Each row is a right eigenvector of the HB matrix
``M = [[A, -B], [B*, -A*]]``, so ``t @ M.T @ inv(t) = diag(Omega, -Omega)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateNormError, InstabilityError

STABILITY_TOL = 1e-9
GROUPING_TOL = 1e-9


def sigma_z(n_modes: int) -> NDArray[np.float64]:
    """Symplectic metric diag(I_N, -I_N)."""
    return np.diag(np.concatenate([np.ones(n_modes), -np.ones(n_modes)]))


def swap_blocks(n_modes: int) -> NDArray[np.float64]:
    """Permutation exchanging the annihilation and creation halves."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [eye, zero]])


def commutator_form(n_modes: int) -> NDArray[np.float64]:
    """Matrix C with [x_i, x_j] = C[i, j] for the Nambu field."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class QuadraticSystem:
    """N bosonic modes with rotating-wave (lam) and counter-rotating (g) couplings.

    ``lam`` and ``g`` are upper triangular; only entries with i < j are read.
    """

    omega: NDArray[np.float64]
    chi: NDArray[np.complex128] = None
    lam: NDArray[np.complex128] = None
    g: NDArray[np.complex128] = None

    def __post_init__(self):
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        n = omega.size
        if n < 1:
            raise ValueError("need at least one mode")
        chi = np.zeros(n, complex) if self.chi is None else np.asarray(self.chi, complex)
        lam = np.zeros((n, n), complex) if self.lam is None else np.asarray(self.lam, complex)
        g = np.zeros((n, n), complex) if self.g is None else np.asarray(self.g, complex)
        if chi.shape != (n,) or lam.shape != (n, n) or g.shape != (n, n):
            raise ValueError("array shapes inconsistent with number of modes")
        # only the strict upper triangle carries couplings
        lam = np.triu(lam, 1)
        g = np.triu(g, 1)
        for name, value in (("omega", omega), ("chi", chi), ("lam", lam), ("g", g)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_modes(self) -> int:
        return self.omega.size

    @classmethod
    def from_couplings(cls, omega, couplings=(), chi=None) -> "QuadraticSystem":
        """Build from an iterable of ``(i, j, lam_ij, g_ij)`` tuples."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        n = omega.size
        lam = np.zeros((n, n), complex)
        g = np.zeros((n, n), complex)
        for i, j, lam_ij, g_ij in couplings:
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"bad coupling indices ({i}, {j})")
            if i > j:
                # H_ij + h.c. with i > j: lam a_i a_j^dag = (lam^*)^* a_j^dag a_i
                i, j, lam_ij = j, i, np.conj(lam_ij)
            lam[i, j] += lam_ij
            g[i, j] += g_ij
        return cls(omega=omega, chi=chi, lam=lam, g=g)

    def a_block(self) -> NDArray[np.complex128]:
        """Hermitian block A with A_nn = omega_n and A_ij = lam_ij (i < j)."""
        a = np.diag(self.omega).astype(complex) + self.lam
        return a + np.triu(a, 1).conj().T

    def b_block(self) -> NDArray[np.complex128]:
        """Symmetric block B with B_nn = chi_n and B_ij = g_ij."""
        b = np.diag(self.chi) + self.g
        return b + np.triu(b, 1).T

    def nambu_hamiltonian(self) -> NDArray[np.complex128]:
        """Hermitian H with H = 1/2 x^dag H x - 1/2 sum(omega)."""
        a, b = self.a_block(), self.b_block()
        return np.block([[a.conj(), b.conj()], [b, a]])


@dataclass(frozen=True)
class HBMatrix:
    m: NDArray[np.complex128]

    @property
    def n_modes(self) -> int:
        return self.m.shape[0] // 2


@dataclass(frozen=True)
class NambuVector:
    """Operator sum_i coeffs[i] x_i over the Nambu field."""

    coeffs: NDArray[np.complex128]

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size % 2:
            raise ValueError("Nambu vector must have even length")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size // 2

    @classmethod
    def annihilator(cls, n_modes: int, k: int) -> "NambuVector":
        c = np.zeros(2 * n_modes, complex)
        c[k] = 1.0
        return cls(c)

    @classmethod
    def creator(cls, n_modes: int, k: int) -> "NambuVector":
        c = np.zeros(2 * n_modes, complex)
        c[n_modes + k] = 1.0
        return cls(c)

    def dag(self) -> "NambuVector":
        return NambuVector(swap_blocks(self.n_modes) @ self.coeffs.conj())

    def commutator(self, other: "NambuVector") -> complex:
        """c-number [self, other]."""
        if other.n_modes != self.n_modes:
            raise ValueError("dimension mismatch")
        return complex(self.coeffs @ commutator_form(self.n_modes) @ other.coeffs)

    def __add__(self, other):
        return NambuVector(self.coeffs + other.coeffs)

    def __mul__(self, scalar):
        return NambuVector(self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class BogoliubovTransform:
    t: NDArray[np.complex128]
    t_inv: NDArray[np.complex128]
    dressed_freq: NDArray[np.float64]
    ground_shift: float
    groups: tuple = field(default=())

    @property
    def n_modes(self) -> int:
        return self.dressed_freq.size

    def dressed_operator(self, k: int) -> NambuVector:
        """b_k expressed over the bare Nambu field."""
        return NambuVector(self.t[k])

    def dressed_creator(self, k: int) -> NambuVector:
        return NambuVector(self.t[k + self.n_modes])


def build_hb_matrix(sys: QuadraticSystem) -> HBMatrix:
    a, b = sys.a_block(), sys.b_block()
    return HBMatrix(np.block([[a, -b], [b.conj(), -a.conj()]]))


def _group_by_value(values: NDArray[np.float64], tol: float) -> list[list[int]]:
    order = np.argsort(-values, kind="stable")
    groups: list[list[int]] = []
    for idx in order:
        if groups and abs(values[groups[-1][0]] - values[idx]) < tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


def _canonical_basis(vecs: NDArray[np.complex128], metric: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Symplectic Gram-Schmidt of unit-vector seeds projected onto span(vecs).

    The projector is basis independent, so the output does not depend on the
    eigensolver's choice inside a degenerate subspace.  Seeds are taken
    greedily by largest remaining symplectic norm, ties by lowest index.
    """
    dim, k = vecs.shape
    if k == 1:
        return vecs
    # columns of vecs are metric-orthonormal: v_i^dag S v_j = delta_ij
    proj = vecs @ vecs.conj().T @ metric
    candidates = [proj[:, i].copy() for i in range(dim)]
    basis: list[NDArray[np.complex128]] = []
    for _ in range(k):
        norms = []
        for c in candidates:
            r = c.copy()
            for u in basis:
                r = r - u * (u.conj() @ metric @ r)
            norms.append((float(np.real(r.conj() @ metric @ r)), r))
        best = max(n for n, _ in norms)
        if best < 1e-12:
            raise DegenerateNormError("degenerate subspace has no positive-norm direction")
        for norm, r in norms:
            if norm > best * (1 - 1e-9):
                basis.append(r / np.sqrt(norm))
                break
    return np.column_stack(basis)


def _fix_phase(v: NDArray[np.complex128], n_modes: int) -> NDArray[np.complex128]:
    mu = v[:n_modes]
    mags = np.abs(mu)
    # first entry within roundoff of the maximum decides the phase
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[0])
    return v * (np.abs(mu[k]) / mu[k])


def diagonalize(sys: QuadraticSystem) -> BogoliubovTransform:
    """Hopfield-Bogoliubov diagonalization in the stable normal phase.

    Raises
    ------
    InstabilityError
        Complex HB spectrum, or a non-positive dressed frequency.
    DegenerateNormError
        Singular transformation (zero symplectic norm).
    """
    n = sys.n_modes
    m = build_hb_matrix(sys).m
    scale = np.linalg.norm(m)
    ev = np.linalg.eigvals(m)
    if np.max(np.abs(ev.imag)) > STABILITY_TOL * scale:
        raise InstabilityError("HB spectrum is complex: system is dynamically unstable")

    metric = sigma_z(n)
    # M = metric @ K with K Hermitian; K > 0 is the stable normal phase
    k_mat = metric @ m
    k_mat = 0.5 * (k_mat + k_mat.conj().T)
    kmin = np.linalg.eigvalsh(k_mat)[0]
    if kmin <= STABILITY_TOL * scale:
        raise InstabilityError("quadratic form is not positive definite (zero or negative dressed frequency)")
    chol = np.linalg.cholesky(k_mat)
    reduced = chol.conj().T @ metric @ chol
    w, u = np.linalg.eigh(0.5 * (reduced + reduced.conj().T))
    pos = w > 0
    if pos.sum() != n:
        raise InstabilityError("wrong number of positive-norm modes")
    omegas = w[pos]
    vecs = np.linalg.solve(chol.conj().T, u[:, pos])
    vecs = vecs * np.sqrt(omegas)[None, :]

    norms = np.real(np.einsum("ik,ij,jk->k", vecs.conj(), metric, vecs))
    if np.min(np.abs(norms)) < 1e-9:
        raise DegenerateNormError("Bogoliubov transformation is singular")

    groups = _group_by_value(omegas, GROUPING_TOL * omegas.max())
    rows, freqs, out_groups = [], [], []
    for grp in groups:
        block = _canonical_basis(vecs[:, grp], metric)
        out_groups.append(tuple(range(len(rows), len(rows) + len(grp))))
        omega_grp = float(np.mean(omegas[grp]))
        for j in range(block.shape[1]):
            rows.append(_fix_phase(block[:, j], n))
            freqs.append(omega_grp)

    upper = np.array(rows)
    mu, nu = upper[:, :n], upper[:, n:]
    t = np.block([[mu, nu], [nu.conj(), mu.conj()]])
    t_inv = metric @ t.conj().T @ metric
    freqs = np.array(freqs)
    ground = 0.5 * float(np.sum(freqs) - np.sum(sys.omega))
    for arr in (t, t_inv, freqs):
        arr.setflags(write=False)
    return BogoliubovTransform(t=t, t_inv=t_inv, dressed_freq=freqs, ground_shift=ground,
                               groups=tuple(out_groups))


def phi_coefficients(bt: BogoliubovTransform, n: int) -> NDArray[np.complex128]:
    """Weights phi_{n,k} of b_k in the bath coupling operator a_n + a_n^dag."""
    N = bt.n_modes
    if not 0 <= n < N:
        raise IndexError(f"mode index {n} out of range for {N} modes")
    row = bt.t_inv[n]
    return row[:N] + row[N:].conj()


def expectation_frame_change(bt: BogoliubovTransform, v: NambuVector) -> NambuVector:
    """Re-express a bare-mode operator in dressed-mode coefficients."""
    if v.n_modes != bt.n_modes:
        raise ValueError("dimension mismatch")
    return NambuVector(bt.t_inv.T @ v.coeffs)


def dressed_to_bare(bt: BogoliubovTransform, v: NambuVector) -> NambuVector:
    """Inverse of :func:`expectation_frame_change`."""
    if v.n_modes != bt.n_modes:
        raise ValueError("dimension mismatch")
    return NambuVector(bt.t.T @ v.coeffs)
