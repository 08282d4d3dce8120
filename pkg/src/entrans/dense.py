"""Explicit dense matrices built from Kronecker products of Pauli matrices.

This is the reference construction used by the small-system oracles.  It does
not share code with the bit-manipulation kernels in :mod:`entrans.model`.
"""
from __future__ import annotations

from functools import reduce

import numpy as np
import scipy.linalg

from .model import ChainSpec, ContractError, HamiltonianKind, Kind, drive_amplitude, effective_coefficients

MAX_DENSE_L = 12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def site_operator(L: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Tensor product with ``ops[i]`` on site ``i`` (1-indexed, leftmost factor = site 1)."""
    return reduce(np.kron, [ops.get(i, I2) for i in range(1, L + 1)])


def _check(L):
    if L > MAX_DENSE_L:
        raise ContractError(f"dense construction limited to L <= {MAX_DENSE_L}, got L={L}")


def zz_part(L: int) -> np.ndarray:
    return sum(site_operator(L, {i: SZ, i + 1: SZ}) for i in range(1, L))


def x_part(L: int) -> np.ndarray:
    return sum(site_operator(L, {i: SX}) for i in range(1, L + 1))


def driven_matrix(spec: ChainSpec, t: float) -> np.ndarray:
    _check(spec.L)
    return -spec.J * zz_part(spec.L) - drive_amplitude(spec, t) * x_part(spec.L)


def static_matrix(spec: ChainSpec) -> np.ndarray:
    return driven_matrix(spec, 0.0)


def effective_matrix(spec: ChainSpec, omega: float | None = None) -> np.ndarray:
    _check(spec.L)
    L = spec.L
    c = effective_coefficients(spec, omega)
    H = c["zz"] * zz_part(L)
    H = H + c["yy"] * sum(site_operator(L, {i: SY, i + 1: SY}) for i in range(1, L))
    H = H + c["x_boundary"] * (site_operator(L, {1: SX}) + site_operator(L, {L: SX}))
    for i in range(2, L):
        H = H + c["x_bulk"] * site_operator(L, {i: SX})
        H = H + c["zxz"] * site_operator(L, {i - 1: SZ, i: SX, i + 1: SZ})
    return H


def matrix(spec: ChainSpec, kind: HamiltonianKind, t: float = 0.0) -> np.ndarray:
    if kind.kind is Kind.DRIVEN:
        return driven_matrix(spec, t)
    if kind.kind is Kind.STATIC:
        return static_matrix(spec)
    return effective_matrix(spec, kind.omega)


def parity_matrix(n_sites: int) -> np.ndarray:
    return site_operator(n_sites, {i: SX for i in range(1, n_sites + 1)})


def reduced_density_matrix(psi: np.ndarray, L: int, L_A: int) -> np.ndarray:
    """Partial trace over the right ``L - L_A`` sites via explicit index sums."""
    dA, dB = 1 << L_A, 1 << (L - L_A)
    rho = np.zeros((dA, dA), dtype=complex)
    for a in range(dA):
        for a2 in range(dA):
            rho[a, a2] = sum(psi[a * dB + b] * np.conj(psi[a2 * dB + b]) for b in range(dB))
    return rho


def midpoint_propagation(spec: ChainSpec, kind: HamiltonianKind, psi0, dt: float, n_steps: int):
    """Step-matched reference: ``psi <- expm(-i dt H(t + dt/2)) psi`` with dense ``expm``."""
    psi = np.array(psi0, dtype=complex)
    states = [psi.copy()]
    for k in range(n_steps):
        H = matrix(spec, kind, (k + 0.5) * dt)
        psi = scipy.linalg.expm(-1j * dt * H) @ psi
        states.append(psi.copy())
    return states


def cfm4_propagation(spec: ChainSpec, psi0, dt: float, n_steps: int):
    """Dense reference for the fourth-order two-exponential Magnus step."""
    _check(spec.L)
    zz, xx = zz_part(spec.L), x_part(spec.L)
    r = np.sqrt(3.0)
    c1, c2 = 0.5 - r / 6.0, 0.5 + r / 6.0
    a1, a2 = (3.0 + 2.0 * r) / 12.0, (3.0 - 2.0 * r) / 12.0
    psi = np.array(psi0, dtype=complex)
    states = [psi.copy()]
    for k in range(n_steps):
        t = k * dt
        f1, f2 = drive_amplitude(spec, t + c1 * dt), drive_amplitude(spec, t + c2 * dt)
        A1 = -0.5 * spec.J * zz - (a1 * f1 + a2 * f2) * xx
        A2 = -0.5 * spec.J * zz - (a2 * f1 + a1 * f2) * xx
        psi = scipy.linalg.expm(-1j * dt * A2) @ (scipy.linalg.expm(-1j * dt * A1) @ psi)
        states.append(psi.copy())
    return states
