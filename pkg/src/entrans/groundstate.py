"""Ground state of the static Hamiltonian (the initial condition of every run)."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import dense, states
from .model import ChainSpec, ContractError, apply_terms, static_terms

log = logging.getLogger(__name__)

FALLBACK_SEED = 1234


@dataclass
class GroundStateResult:
    energy: float
    state: np.ndarray
    residual: float
    iterations: int


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver misses its tolerance.

    ``best`` holds the best result found so the caller can decide what to do.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best

    @property
    def best_residual(self):
        return None if self.best is None else self.best.residual


class _RealOperator:
    """Static H acting on real vectors (H_static is real in this basis)."""

    def __init__(self, spec):
        self.terms = static_terms(spec)
        self._in = np.empty(spec.dim, dtype=complex)
        self._out = np.empty(spec.dim, dtype=complex)
        self.calls = 0

    def __call__(self, v):
        self._in[:] = v
        apply_terms(self.terms, self._in, self._out)
        self.calls += 1
        return self._out.real.copy()


def _orthogonalize(w, basis):
    # two classical Gram-Schmidt passes ("twice is enough")
    if basis:
        V = np.asarray(basis)
        for _ in range(2):
            w -= V.T @ (V @ w)
    return w


def _lanczos_cycle(op, v0, m, tol, rng):
    """One Lanczos run with full reorthogonalization; returns (theta, ritz vector)."""
    basis = [v0 / np.linalg.norm(v0)]
    alphas, betas = [], []
    theta, y = None, None
    for j in range(m):
        w = op(basis[j])
        alpha = float(np.dot(basis[j], w))
        alphas.append(alpha)
        w = _orthogonalize(w, basis)
        beta = float(np.linalg.norm(w))
        if len(alphas) == 1:
            evals, evecs = np.array([alpha]), np.ones((1, 1))
        else:
            evals, evecs = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
        theta, y = evals[0], evecs[:, 0]
        if len(basis) == len(basis[0]):
            break
        scale = max(1.0, abs(theta))
        if beta <= 1e-13 * scale:
            # invariant subspace: continue with a fresh random direction
            log.debug("Lanczos breakdown at step %d; extending with a random vector", j)
            w = _orthogonalize(rng.standard_normal(len(basis[0])), basis)
            w = _orthogonalize(w, basis)
            betas.append(0.0)
            basis.append(w / np.linalg.norm(w))
            continue
        if beta * abs(y[-1]) <= 0.1 * tol:
            break
        if j + 1 < m:
            betas.append(beta)
            basis.append(w / beta)
    x = np.asarray(basis[: len(y)]).T @ y
    return theta, x / np.linalg.norm(x)


def lanczos_ground_state(spec: ChainSpec, tol: float = 1e-12, max_iter: int = 500,
                         cycle: int | None = None) -> GroundStateResult:
    """Lowest eigenpair of the static Hamiltonian.

    Starts from the Neel state and restarts from the current Ritz vector until
    the explicit residual ``||H psi - E psi||`` drops below ``tol``.  A random
    direction (seed 1234) is mixed in when the Krylov space is invariant or the
    residual stagnates.  ``max_iter`` bounds the total number of H applications.
    """
    if tol <= 0:
        raise ContractError("tol must be positive")
    op = _RealOperator(spec)
    rng = np.random.default_rng(FALLBACK_SEED)
    if cycle is None:
        cycle = 120 if spec.L <= 16 else 60
    v = states.neel(spec.L).real.copy()
    best = None
    prev_residual = np.inf
    while op.calls < max_iter:
        m = min(cycle, spec.dim, max_iter - op.calls)
        if m < 1:
            break
        _, x = _lanczos_cycle(op, v, m, tol, rng)
        hx = op(x)
        energy = float(np.dot(x, hx))
        residual = float(np.linalg.norm(hx - energy * x))
        result = GroundStateResult(energy, x.astype(complex), residual, op.calls)
        if best is None or residual < best.residual:
            best = result
        if residual <= tol:
            return result
        if residual > 0.5 * prev_residual:
            kick = rng.standard_normal(spec.dim)
            v = x + 1e-3 * kick / np.linalg.norm(kick)
        else:
            v = x
        prev_residual = residual
    raise ConvergenceError(
        f"Lanczos did not reach residual {tol:g} in {max_iter} iterations "
        f"(best {best.residual if best else float('nan'):.3e})",
        best,
    )


def dense_ground_state(spec: ChainSpec) -> GroundStateResult:
    """Reference ground state by full diagonalization (L <= 12)."""
    if spec.L > dense.MAX_DENSE_L:
        raise ContractError(f"dense_ground_state supports L <= {dense.MAX_DENSE_L}")
    H = dense.static_matrix(spec).real
    evals, evecs = np.linalg.eigh(H)
    psi = evecs[:, 0].astype(complex)
    residual = float(np.linalg.norm(H @ psi - evals[0] * psi))
    return GroundStateResult(float(evals[0]), psi, residual, 0)
