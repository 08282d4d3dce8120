"""Driven transverse-field Ising chain and its matrix-free Hamiltonians.

Basis convention: site ``i`` (1-indexed) lives in bit ``L - i`` of the basis
index, so site 1 is the most significant bit, and spin up (sigma^z = +1) is
bit value 0.  Subsystem A (the first ``L_A`` sites) therefore occupies the top
``L_A`` bits and a state reshaped to ``(2**L_A, 2**(L - L_A))`` is its Schmidt
matrix.

Every Hamiltonian here is a real diagonal (the ZZ part) plus a list of
signed bit-flip terms::

    (H psi)[b] = diag[b] psi[b] + sum_k coef_k (-1)^popcount(b & smask_k) psi[b ^ mask_k]

which is what :mod:`entrans.kernels` applies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import kernels


class ContractError(ValueError):
    """A caller violated a documented precondition."""


@dataclass(frozen=True)
class ChainSpec:
    """Physical and drive parameters of an open chain.

    ``omega`` is the angular drive frequency; ``h0`` is the drive amplitude, so
    the transverse field is ``(h0/2) cos(omega t)``.
    """

    L: int
    L_A: int
    J: float = 1.0
    h0: float = 2.0
    omega: float = 5.0

    boundary = "open"

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or not 2 <= self.L <= 24:
            raise ContractError(f"L must be an integer in [2, 24], got {self.L!r}")
        if not isinstance(self.L_A, (int, np.integer)) or not 1 <= self.L_A <= self.L - 1:
            raise ContractError(f"L_A must be in [1, L-1] = [1, {self.L - 1}], got {self.L_A!r}")
        for name in ("J", "h0", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise ContractError(f"{name} must be finite")
        if self.J <= 0:
            raise ContractError(f"J must be positive, got {self.J}")
        if self.omega < 0:
            raise ContractError(f"omega must be non-negative, got {self.omega}")

    @property
    def dim(self) -> int:
        return 1 << self.L

    def site_mask(self, i: int) -> int:
        """Bit mask of site ``i`` (1-indexed)."""
        return 1 << (self.L - i)


class Kind(str, Enum):
    DRIVEN = "driven"
    STATIC = "static"
    EFFECTIVE = "effective"


@dataclass(frozen=True)
class HamiltonianKind:
    """Which Hamiltonian to apply.

    ``omega`` is only meaningful for ``EFFECTIVE``; when left as ``None`` the
    chain's own drive frequency is used to build the effective couplings.
    """

    kind: Kind = Kind.DRIVEN
    omega: float | None = None

    @classmethod
    def driven(cls):
        return cls(Kind.DRIVEN)

    @classmethod
    def static(cls):
        return cls(Kind.STATIC)

    @classmethod
    def effective(cls, omega=None):
        return cls(Kind.EFFECTIVE, omega)

    @property
    def time_dependent(self) -> bool:
        return self.kind is Kind.DRIVEN


class Terms(NamedTuple):
    diag: np.ndarray
    masks: np.ndarray
    smasks: np.ndarray
    coefs: np.ndarray


def drive_amplitude(spec: ChainSpec, t: float) -> float:
    """Transverse field ``(h0/2) cos(omega t)``."""
    return 0.5 * spec.h0 * math.cos(spec.omega * t)


@lru_cache(maxsize=8)
def zz_bond_sum(L: int) -> np.ndarray:
    """``sum_i z_i z_{i+1}`` for every basis index (open chain), as float64."""
    idx = np.arange(1 << L, dtype=np.int64)
    total = np.zeros(1 << L, dtype=np.int64)
    for bit in range(L - 1):
        # neighbouring sites occupy neighbouring bits; aligned spins give +1
        total += 1 - 2 * (((idx >> bit) ^ (idx >> (bit + 1))) & 1)
    out = total.astype(np.float64)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=32)
def _scaled_diag(L: int, coef: float) -> np.ndarray:
    out = coef * zz_bond_sum(L)
    out.flags.writeable = False
    return out


def _terms(diag, masks, smasks, coefs) -> Terms:
    return Terms(
        diag,
        np.asarray(masks, dtype=np.int64),
        np.asarray(smasks, dtype=np.int64),
        np.asarray(coefs, dtype=np.float64),
    )


def driven_terms(spec: ChainSpec, t: float) -> Terms:
    return field_terms(spec, drive_amplitude(spec, t))


def field_terms(spec: ChainSpec, field: float, coupling: float | None = None) -> Terms:
    """``-coupling sum ZZ - field sum X``; ``coupling`` defaults to ``spec.J``."""
    L = spec.L
    J = spec.J if coupling is None else coupling
    masks = [spec.site_mask(i) for i in range(1, L + 1)]
    return _terms(_scaled_diag(L, -J), masks, [0] * L, [-field] * L)


def static_terms(spec: ChainSpec) -> Terms:
    return driven_terms(spec, 0.0)


def effective_coefficients(spec: ChainSpec, omega: float | None = None) -> dict:
    """Couplings of the second-order high-frequency effective Hamiltonian."""
    w = spec.omega if omega is None else omega
    if not w > 0:
        raise ContractError("the effective Hamiltonian needs omega > 0")
    J, h0 = spec.J, spec.h0
    r = 1.0 / (w * w)
    return {
        "zz": -J * (1.0 + 0.5 * h0 * h0 * r),
        "yy": 0.5 * h0 * h0 * J * r,
        "x_boundary": -2.0 * h0 * J * J * r,
        "x_bulk": -4.0 * h0 * J * J * r,
        "zxz": -4.0 * h0 * J * J * r,
    }


def effective_terms(spec: ChainSpec, omega: float | None = None) -> Terms:
    c = effective_coefficients(spec, omega)
    L = spec.L
    m = spec.site_mask
    masks, smasks, coefs = [], [], []
    # sigma^y sigma^y on (i, i+1) = -(-1)^(s_i + s_{i+1}) times the double flip
    for i in range(1, L):
        pair = m(i) | m(i + 1)
        masks.append(pair)
        smasks.append(pair)
        coefs.append(-c["yy"])
    for i in (1, L):
        masks.append(m(i))
        smasks.append(0)
        coefs.append(c["x_boundary"])
    for i in range(2, L):
        masks.append(m(i))
        smasks.append(0)
        coefs.append(c["x_bulk"])
    for i in range(2, L):
        masks.append(m(i))
        smasks.append(m(i - 1) | m(i + 1))
        coefs.append(c["zxz"])
    return _terms(_scaled_diag(L, c["zz"]), masks, smasks, coefs)


def hamiltonian_terms(spec: ChainSpec, kind: HamiltonianKind, t: float = 0.0) -> Terms:
    if kind.kind is Kind.DRIVEN:
        return driven_terms(spec, t)
    if kind.kind is Kind.STATIC:
        return static_terms(spec)
    return effective_terms(spec, kind.omega)


def apply_terms(terms: Terms, psi: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """Write ``H psi`` into ``out`` (allocated if not given) and return it."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    if psi.ndim != 1 or psi.shape[0] != terms.diag.shape[0]:
        raise ContractError(
            f"state has shape {psi.shape}, expected ({terms.diag.shape[0]},)"
        )
    if out is None:
        out = np.empty_like(psi)
    elif out.shape != psi.shape or out.dtype != np.complex128 or not out.flags.c_contiguous:
        raise ContractError("output buffer must be a contiguous complex128 array of the state's shape")
    kernels.apply_terms(
        psi.view(np.float64).reshape(-1, 2),
        terms.diag,
        terms.masks,
        terms.smasks,
        terms.coefs,
        out.view(np.float64).reshape(-1, 2),
    )
    return out


def _check_dim(spec: ChainSpec, psi):
    if np.shape(psi) != (spec.dim,):
        raise ContractError(f"state has shape {np.shape(psi)}, expected ({spec.dim},) for L={spec.L}")


def apply_driven(spec: ChainSpec, psi, t: float, out=None) -> np.ndarray:
    """``H(t) psi`` (not normalized)."""
    _check_dim(spec, psi)
    return apply_terms(driven_terms(spec, t), psi, out)


def apply_static(spec: ChainSpec, psi, out=None) -> np.ndarray:
    _check_dim(spec, psi)
    return apply_terms(static_terms(spec), psi, out)


def apply_effective(spec: ChainSpec, psi, out=None, omega: float | None = None) -> np.ndarray:
    _check_dim(spec, psi)
    return apply_terms(effective_terms(spec, omega), psi, out)


def apply_hamiltonian(spec: ChainSpec, kind: HamiltonianKind, psi, t: float = 0.0, out=None):
    _check_dim(spec, psi)
    return apply_terms(hamiltonian_terms(spec, kind, t), psi, out)


def global_parity(psi: np.ndarray) -> float:
    """``<psi| prod_i sigma^x_i |psi>``; the full flip reverses the index order."""
    return float(np.vdot(psi, psi[::-1]).real)
