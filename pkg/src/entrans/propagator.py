"""Krylov time propagation of state vectors and whole-system observables."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
import scipy.linalg

from .model import (
    ChainSpec,
    ContractError,
    HamiltonianKind,
    Kind,
    Terms,
    apply_terms,
    drive_amplitude,
    field_terms,
    hamiltonian_terms,
)

log = logging.getLogger(__name__)

INTEGRATORS = ("cfm4", "midpoint", "cell_average")

# two-exponential commutator-free Magnus scheme on Gauss-Legendre nodes
_SQ3 = math.sqrt(3.0)
CFM4_NODES = (0.5 - _SQ3 / 6.0, 0.5 + _SQ3 / 6.0)
CFM4_WEIGHTS = ((3.0 + 2.0 * _SQ3) / 12.0, (3.0 - 2.0 * _SQ3) / 12.0)
OVERLAP_FLOOR = 1e-300


class KrylovError(RuntimeError):
    pass


@dataclass
class EvolutionConfig:
    """Time grid and Krylov settings of one evolution.

    Integrators for the driven Hamiltonian:

    ``"cfm4"`` (default)
        fourth-order commutator-free Magnus: two exponentials per step built
        from H at the Gauss-Legendre nodes.
    ``"midpoint"``
        one exponential of H frozen at ``t + dt/2`` (second order).
    ``"cell_average"``
        one exponential of H with the drive averaged over the step; stays
        sensible when ``omega * dt`` is not small (needs ``allow_coarse_dt``).

    Time-independent kinds always use a single exact exponential per step.
    """

    dt: float
    t_max: float
    hamiltonian: HamiltonianKind = field(default_factory=HamiltonianKind.driven)
    krylov_dim_max: int = 30
    krylov_tol: float = 1e-10
    record_stride: int = 1
    allow_coarse_dt: bool = False
    integrator: str = "cfm4"

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ContractError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.t_max) and self.t_max >= 0):
            raise ContractError(f"t_max must be non-negative, got {self.t_max}")
        if self.t_max > 0 and self.dt > self.t_max:
            raise ContractError(f"dt={self.dt} exceeds t_max={self.t_max}")
        if self.record_stride < 1:
            raise ContractError("record_stride must be >= 1")
        if self.krylov_dim_max < 2:
            raise ContractError("krylov_dim_max must be >= 2")
        if self.integrator not in INTEGRATORS:
            raise ContractError(f"integrator must be one of {INTEGRATORS}")
        self.n_steps  # validates the grid

    @property
    def n_steps(self) -> int:
        n = round(self.t_max / self.dt)
        if abs(n * self.dt - self.t_max) > 1e-9 * max(1.0, self.t_max):
            raise ContractError(f"t_max={self.t_max} is not a multiple of dt={self.dt}")
        return int(n)

    def check(self, spec: ChainSpec):
        """Enforce ``dt <= 0.1/omega`` for driven runs unless overridden."""
        if (
            self.hamiltonian.kind is Kind.DRIVEN
            and spec.omega > 0
            and self.dt > 0.1 / spec.omega * (1 + 1e-12)
            and not self.allow_coarse_dt
        ):
            raise ContractError(
                f"dt={self.dt} violates dt <= 0.1/omega = {0.1 / spec.omega:.4g}; "
                "set allow_coarse_dt to override"
            )


@dataclass
class WholeSystemRecord:
    t: float
    loschmidt_rate: float
    clamped: bool = False
    fidelity_vs_reference: float | None = None


@dataclass
class StepStats:
    steps: int = 0
    max_norm_drift: float = 0.0
    max_krylov_dim: int = 0
    krylov_dims: list = field(default_factory=list)


@dataclass
class EvolutionLog:
    records: list
    stats: StepStats
    final_state: np.ndarray
    times: list


class KrylovExpm:
    """``exp(-i tau H) psi`` in an adaptive Lanczos subspace.

    Buffers are allocated once and reused across calls.
    """

    def __init__(self, dim: int, m_max: int = 30, tol: float = 1e-10):
        self.m_max = m_max
        self.tol = tol
        self.V = np.empty((m_max + 1, dim), dtype=np.complex128)
        self.w = np.empty(dim, dtype=np.complex128)
        self.last_dim = 0
        self.last_error = 0.0

    def __call__(self, terms: Terms, psi: np.ndarray, tau: float) -> np.ndarray:
        V, w = self.V, self.w
        beta0 = np.linalg.norm(psi)
        np.divide(psi, beta0, out=V[0])
        alphas, betas = [], []
        for j in range(self.m_max):
            apply_terms(terms, V[j], w)
            basis = V[: j + 1]
            h = (basis @ w.conj()).conj()
            w -= h @ basis
            w -= (basis @ w.conj()).conj() @ basis
            alphas.append(h[j].real)
            b = float(np.linalg.norm(w))
            evals, evecs = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas)) \
                if j else (np.array(alphas), np.ones((1, 1)))
            c = evecs @ (np.exp(-1j * tau * evals) * evecs[0])
            err = b * abs(c[-1])
            if err <= self.tol or b <= 1e-14 * max(1.0, abs(evals).max()):
                self.last_dim = j + 1
                self.last_error = err
                return beta0 * (c @ basis)
            betas.append(b)
            np.divide(w, b, out=V[j + 1])
        raise KrylovError(
            f"Krylov estimate {err:.2e} above tolerance {self.tol:.1e} at dimension "
            f"{self.m_max}; use a smaller dt"
        )


class Propagator:
    """Steps a state under one Hamiltonian kind with reusable buffers."""

    def __init__(self, spec: ChainSpec, config: EvolutionConfig):
        config.check(spec)
        self.spec = spec
        self.config = config
        self.expm = KrylovExpm(spec.dim, config.krylov_dim_max, config.krylov_tol)
        self._static_terms = None
        if not config.hamiltonian.time_dependent:
            self._static_terms = hamiltonian_terms(spec, config.hamiltonian)
        self.stats = StepStats()

    def exponentials(self, t: float) -> list:
        """``(terms, tau)`` factors of the step from ``t``, in application order."""
        spec, dt = self.spec, self.config.dt
        if self._static_terms is not None:
            return [(self._static_terms, dt)]
        integrator = self.config.integrator
        if integrator == "midpoint":
            return [(hamiltonian_terms(spec, self.config.hamiltonian, t + 0.5 * dt), dt)]
        if integrator == "cell_average":
            w = spec.omega
            avg = 1.0 if w == 0 else (math.sin(w * (t + dt)) - math.sin(w * t)) / (w * dt)
            return [(field_terms(spec, 0.5 * spec.h0 * avg), dt)]
        f1, f2 = (drive_amplitude(spec, t + c * dt) for c in CFM4_NODES)
        a1, a2 = CFM4_WEIGHTS
        half = 0.5 * spec.J
        return [
            (field_terms(spec, a1 * f1 + a2 * f2, coupling=half), dt),
            (field_terms(spec, a2 * f1 + a1 * f2, coupling=half), dt),
        ]

    def step(self, psi: np.ndarray, t: float) -> np.ndarray:
        phi = psi
        for terms, tau in self.exponentials(t):
            phi = self.expm(terms, phi, tau)
            self.stats.krylov_dims.append(self.expm.last_dim)
            self.stats.max_krylov_dim = max(self.stats.max_krylov_dim, self.expm.last_dim)
        norm = np.linalg.norm(phi)
        drift = abs(norm - 1.0)
        st = self.stats
        st.steps += 1
        st.max_norm_drift = max(st.max_norm_drift, drift)
        if drift > 1e-10:
            log.warning("norm drift %.3e at t=%.6g", drift, t)
        phi /= norm
        return phi


def step(spec: ChainSpec, config: EvolutionConfig, state: np.ndarray, t: float) -> np.ndarray:
    """Advance ``state`` from ``t`` to ``t + dt`` (renormalized).

    With ``integrator="midpoint"`` this is ``exp(-i dt H(t + dt/2)) |state>``.
    """
    return Propagator(spec, config).step(np.asarray(state, dtype=complex), t)


Observer = Callable[[float, np.ndarray], None]


def evolve(spec: ChainSpec, config: EvolutionConfig, initial: np.ndarray,
           observers: Iterable[Observer] = ()) -> EvolutionLog:
    """Propagate from t=0 to t_max, calling observers every ``record_stride`` steps.

    Observers are called synchronously, in order, as ``obs(t, state)``; the
    state passed in must not be modified.  Whole-system records (Loschmidt
    rate) are collected into the returned log.
    """
    observers = list(observers)
    psi0 = np.array(initial, dtype=np.complex128)
    if psi0.shape != (spec.dim,):
        raise ContractError(f"initial state has shape {psi0.shape}, expected ({spec.dim},)")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ContractError("initial state must be normalized")
    prop = Propagator(spec, config)
    records, times = [], []

    def record(t, psi):
        rate, clamped = loschmidt_rate(psi0, psi, spec.L, return_flag=True)
        records.append(WholeSystemRecord(t, rate, clamped))
        times.append(t)
        for obs in observers:
            obs(t, psi)

    psi = psi0.copy()
    record(0.0, psi)
    n = config.n_steps
    for k in range(n):
        psi = prop.step(psi, k * config.dt)
        if (k + 1) % config.record_stride == 0:
            record((k + 1) * config.dt, psi)
    return EvolutionLog(records, prop.stats, psi, times)


def loschmidt_rate(initial: np.ndarray, current: np.ndarray, L: int,
                   cap: float | None = None, return_flag: bool = False):
    """``-ln |<psi(0)|psi(t)>|^2 / L``.

    Overlaps below 1e-300 in magnitude are clamped; the clamped value is
    ``cap`` when given, otherwise the rate at the floor itself.
    """
    overlap = abs(np.vdot(initial, current))
    clamped = overlap < OVERLAP_FLOOR
    if clamped:
        rate = cap if cap is not None else -2.0 * math.log(OVERLAP_FLOOR) / L
    else:
        rate = max(0.0, -2.0 * math.log(overlap) / L)
    return (rate, clamped) if return_flag else rate


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|^2``."""
    if np.shape(a) != np.shape(b):
        raise ContractError(f"dimension mismatch {np.shape(a)} vs {np.shape(b)}")
    return float(abs(np.vdot(a, b)) ** 2)
