"""
Brute-force truncated Fock-space evolution of a LindbladModel.

This is the reference the moment equations are checked against, so it is
built only from the model's definition: the Hamiltonian is assembled from
omega, chi, lam and g as operator products, never from the HB matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np
from scipy import sparse

from .errors import DimensionGuard, StepTooLarge, TruncationError
from .lindblad import LindbladModel
from .moments import drift, propagate
from .nambu import NambuVector

MAX_DIM = 65536
LEAK_TOL = 1e-6
MAX_STEP_FACTOR = 0.1


def _annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)


def _embed(op: np.ndarray, k: int, dims: Sequence[int]) -> np.ndarray:
    mats = [op if i == k else np.eye(d) for i, d in enumerate(dims)]
    return reduce(np.kron, mats)


@dataclass(frozen=True)
class FockRep:
    cutoffs: tuple
    a: tuple
    hamiltonian: np.ndarray
    jumps: tuple            # (dense operator, rate) pairs
    top_layer: np.ndarray   # projector diagonal onto states with some n_k = n_max
    frequency_scale: float
    bare_freq: tuple = ()

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def n_modes(self) -> int:
        return len(self.cutoffs)

    def linear_operator(self, v: NambuVector) -> np.ndarray:
        n = self.n_modes
        if v.coeffs.size != 2 * n:
            raise ValueError("dimension mismatch")
        out = np.zeros((self.dim, self.dim), complex)
        for k in range(n):
            out += v.coeffs[k] * self.a[k] + v.coeffs[n + k] * self.a[k].conj().T
        return out

    @classmethod
    def from_model(cls, model: LindbladModel, cutoff=6) -> "FockRep":
        n = model.n_modes
        cutoffs = tuple([int(cutoff)] * n if np.isscalar(cutoff) else [int(c) for c in cutoff])
        if len(cutoffs) != n or min(cutoffs) < 1:
            raise ValueError("one positive cutoff per mode required")
        dims = [c + 1 for c in cutoffs]
        dim = int(np.prod(dims))
        if dim > MAX_DIM:
            raise DimensionGuard(f"Fock dimension {dim} exceeds {MAX_DIM}")
        a = tuple(_embed(_annihilation(c), k, dims) for k, c in enumerate(cutoffs))
        ad = tuple(x.conj().T for x in a)

        sys = model.hamiltonian
        h = np.zeros((dim, dim), complex)
        for k in range(n):
            h += sys.omega[k] * ad[k] @ a[k]
            sq = 0.5 * sys.chi[k] * a[k] @ a[k]
            h += sq + sq.conj().T
        for i in range(n):
            for j in range(i + 1, n):
                term = sys.g[i, j] * a[i] @ a[j] + sys.lam[i, j] * a[i] @ ad[j]
                h += term + term.conj().T

        def as_matrix(v: NambuVector) -> np.ndarray:
            return sum(v.coeffs[k] * a[k] + v.coeffs[n + k] * ad[k] for k in range(n))

        jumps = [(as_matrix(j.op), j.rate) for j in model.jumps]
        for blk in model.cross_blocks:
            rates, vecs = np.linalg.eigh(blk.rate_matrix)
            mats = [as_matrix(op) for op in blk.ops]
            for r, u in zip(rates, vecs.T):
                if r > 0:
                    jumps.append((sum(c * m for c, m in zip(u, mats)), float(r)))

        grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
        top = np.zeros(dims, bool)
        for k, c in enumerate(cutoffs):
            top |= grids[k] == c
        scales = [abs(x) for x in sys.omega] + [abs(x) for x in sys.chi]
        scales += list(np.abs(sys.lam).ravel()) + list(np.abs(sys.g).ravel())
        scales += [r for _, r in jumps]
        return cls(cutoffs, a, h, tuple(jumps), top.ravel().astype(float), float(max(scales, default=1.0)),
                   tuple(float(w) for w in sys.omega))


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray

    def trace(self) -> complex:
        return complex(np.trace(self.rho))

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    def validate(self, herm_tol=1e-12, trace_tol=1e-10, eig_tol=1e-10) -> None:
        r = self.rho
        if np.max(np.abs(r - r.conj().T)) > herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1) > trace_tol:
            raise ValueError("density matrix trace differs from one")
        if self.min_eigenvalue() < -eig_tol:
            raise ValueError("density matrix has negative eigenvalues")


def coherent_state(rep: FockRep, alphas) -> DensityMatrix:
    """Product of truncated coherent states, renormalized inside the cutoff."""
    alphas = np.atleast_1d(np.asarray(alphas, complex))
    if alphas.size != rep.n_modes:
        raise ValueError("one amplitude per mode")
    kets = []
    for alpha, c in zip(alphas, rep.cutoffs):
        n = np.arange(c + 1)
        log_fact = np.cumsum(np.log(np.maximum(n, 1)))
        amp = np.exp(-0.5 * log_fact) * alpha ** n
        kets.append(amp / np.linalg.norm(amp))
    psi = reduce(np.kron, kets)
    return DensityMatrix(np.outer(psi, psi.conj()))


def gaussian_state(rep: FockRep, alphas) -> DensityMatrix:
    """Displaced ground state of the system Hamiltonian (a pure Gaussian state).

    The displacement drive is chosen so that for uncoupled modes the mean
    field equals ``alphas``; for coupled systems the state is the dressed
    vacuum shifted by a comparable amount.  Unlike a bare coherent state it
    carries no squeezing relative to the dressed modes, which keeps the
    photon-number tail short.
    """
    alphas = np.atleast_1d(np.asarray(alphas, complex))
    if alphas.size != rep.n_modes:
        raise ValueError("one amplitude per mode")
    h = rep.hamiltonian.copy()
    for k, (alpha, a) in enumerate(zip(alphas, rep.a)):
        omega = np.real(rep.bare_freq[k])
        drive = omega * alpha * a.conj().T
        h -= drive + drive.conj().T
    _, vecs = np.linalg.eigh(h)
    psi = vecs[:, 0]
    return DensityMatrix(np.outer(psi, psi.conj()))


def top_population(rep: FockRep, rho: DensityMatrix) -> float:
    return float(np.real(np.diagonal(rho.rho)) @ rep.top_layer)


class _Integrator:
    SPARSE_FROM = 100

    def __init__(self, rep: FockRep):
        h_nh = rep.hamiltonian.copy()
        for op, r in rep.jumps:
            h_nh = h_nh - 1j * r * op.conj().T @ op
        self.sparse = rep.dim >= self.SPARSE_FROM
        scaled = [np.sqrt(2.0 * r) * op for op, r in rep.jumps]
        if self.sparse:
            self.k = sparse.csr_matrix(-1j * h_nh)
            self.ls = [sparse.csr_matrix(op) for op in scaled]
            self.ls_conj = [sparse.csr_matrix(op.conj()) for op in scaled]
        else:
            self.k = -1j * h_nh
            self.ls = np.array(scaled) if scaled else None
            self.lds = np.conj(np.transpose(self.ls, (0, 2, 1))) if scaled else None

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        kr = self.k @ rho
        out = kr + kr.conj().T
        if self.sparse:
            for op, op_conj in zip(self.ls, self.ls_conj):
                # L rho L^dag = (conj(L) (L rho)^T)^T
                out += (op_conj @ (op @ rho).T).T
        elif self.ls is not None:
            out += np.sum(self.ls @ rho @ self.lds, axis=0)
        return out

    def step(self, rho: np.ndarray, dt: float) -> np.ndarray:
        k1 = self.rhs(rho)
        k2 = self.rhs(rho + 0.5 * dt * k1)
        k3 = self.rhs(rho + 0.5 * dt * k2)
        k4 = self.rhs(rho + dt * k3)
        out = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        return 0.5 * (out + out.conj().T)


def _check_step(rep: FockRep, dt: float) -> None:
    if dt <= 0:
        raise ValueError("time step must be positive")
    if dt > MAX_STEP_FACTOR / rep.frequency_scale:
        raise StepTooLarge(f"dt={dt} exceeds {MAX_STEP_FACTOR}/{rep.frequency_scale:.4g}")


def evolve_sampled(rep: FockRep, rho0: DensityMatrix, times: Sequence[float], dt: float,
                   leak_tol: float = LEAK_TOL) -> list[DensityMatrix]:
    """States at each of the increasing ``times`` (fixed-step RK4)."""
    _check_step(rep, dt)
    integ = _Integrator(rep)
    rho = np.array(rho0.rho, dtype=complex)
    t_now = 0.0
    out = []
    for t_target in times:
        if t_target < t_now:
            raise ValueError("sample times must be non-decreasing and non-negative")
        span = t_target - t_now
        n_steps = int(np.ceil(span / dt - 1e-12)) if span > 0 else 0
        for _ in range(n_steps):
            rho = integ.step(rho, span / n_steps)
        t_now = t_target
        state = DensityMatrix(rho.copy())
        leak = top_population(rep, state)
        if leak > leak_tol:
            raise TruncationError(f"top Fock layer population {leak:.3g} at t={t_now:.4g}")
        out.append(state)
    return out


def evolve(rep: FockRep, rho0: DensityMatrix, t: float, dt: float) -> DensityMatrix:
    return evolve_sampled(rep, rho0, [t], dt)[0]


def expect_linear(rep: FockRep, rho: DensityMatrix, v: NambuVector) -> complex:
    """Tr(rho (sum u_i a_i + w_i a_i^dag))."""
    n = rep.n_modes
    if v.coeffs.size != 2 * n:
        raise ValueError("dimension mismatch")
    vals = [np.trace(rho.rho @ a) for a in rep.a]
    return complex(sum(v.coeffs[k] * vals[k] + v.coeffs[n + k] * np.conj(vals[k]) for k in range(n)))


def nambu_expectations(rep: FockRep, rho: DensityMatrix) -> np.ndarray:
    n = rep.n_modes
    return np.array([expect_linear(rep, rho, NambuVector.annihilator(n, k)) for k in range(n)]
                    + [expect_linear(rep, rho, NambuVector.creator(n, k)) for k in range(n)])


@dataclass(frozen=True)
class OracleReport:
    max_deviation: float
    richardson_estimate: float
    max_top_population: float
    min_eigenvalue: float
    trace_drift: float
    t_final: float
    dt: float

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_deviation < tol


def default_horizon(model: LindbladModel) -> float:
    rate = model.max_rate()
    return 5.0 / rate if rate > 0 else 5.0


def moment_deviation(model: LindbladModel, cutoff=6, alphas=None, t_final: Optional[float] = None,
                     dt: Optional[float] = None, n_samples: int = 20, richardson: bool = True,
                     seed: int = 0, initial: str = "gaussian") -> OracleReport:
    """Compare oracle first moments with drift propagation at ``n_samples`` times.

    Moments are compared in the lab frame and bare basis; any rotating frame
    carried by the model only multiplies them by known phases.  The default
    horizon is 5 / max-rate and the default step 0.01 / frequency scale.
    """
    rep = FockRep.from_model(model, cutoff)
    if alphas is None:
        rng = np.random.default_rng(seed)
        alphas = 0.2 * rng.uniform(0.5, 1.0, rep.n_modes) * np.exp(2j * np.pi * rng.uniform(size=rep.n_modes))
    if initial == "gaussian":
        rho0 = gaussian_state(rep, alphas)
    elif initial == "coherent":
        rho0 = coherent_state(rep, alphas)
    else:
        raise ValueError(f"unknown initial state {initial!r}")
    if top_population(rep, rho0) > LEAK_TOL:
        raise TruncationError("initial state is not supported well below the cutoff")
    t_final = default_horizon(model) if t_final is None else float(t_final)
    dt = 0.01 / rep.frequency_scale if dt is None else float(dt)
    times = np.linspace(0.0, t_final, n_samples + 1)[1:]

    g = drift(model, basis="bare", frame=np.zeros(model.n_modes))
    x0 = nambu_expectations(rep, rho0)
    states = evolve_sampled(rep, rho0, times, dt)
    dev = 0.0
    for t, st in zip(times, states):
        dev = max(dev, float(np.max(np.abs(nambu_expectations(rep, st) - propagate(g, x0, t)))))
    rich = 0.0
    if richardson:
        fine = evolve_sampled(rep, rho0, times, dt / 2)
        for coarse, f in zip(states, fine):
            rich = max(rich, float(np.max(np.abs(nambu_expectations(rep, coarse) - nambu_expectations(rep, f)))))
    return OracleReport(
        max_deviation=dev,
        richardson_estimate=rich,
        max_top_population=max(top_population(rep, s) for s in states),
        min_eigenvalue=min(s.min_eigenvalue() for s in states),
        trace_drift=max(abs(s.trace() - 1) for s in states),
        t_final=t_final,
        dt=dt,
    )
