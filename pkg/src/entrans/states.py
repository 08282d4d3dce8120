"""Initial product states in the package basis convention."""
from __future__ import annotations

from functools import reduce

import numpy as np

UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)
PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)


def product_state(site_states) -> np.ndarray:
    """Kronecker product, first factor = site 1 (most significant bit)."""
    return reduce(np.kron, [np.asarray(s, dtype=complex) for s in site_states])


def basis_state(L: int, spins_down=()) -> np.ndarray:
    psi = np.zeros(1 << L, dtype=complex)
    idx = 0
    for i in spins_down:
        idx |= 1 << (L - i)
    psi[idx] = 1.0
    return psi


def all_up(L: int) -> np.ndarray:
    return basis_state(L)


def neel(L: int) -> np.ndarray:
    """|up down up down ...>, site 1 up."""
    return basis_state(L, range(2, L + 1, 2))


def domain_wall(L: int, wall: int | None = None) -> np.ndarray:
    """Sites ``1..wall`` up and the rest down; the wall defaults to ``L // 2``."""
    wall = L // 2 if wall is None else wall
    return basis_state(L, range(wall + 1, L + 1))


def plus_all(L: int) -> np.ndarray:
    return product_state([PLUS] * L)


def random_product(L: int, seed: int = 1234) -> np.ndarray:
    """Product of independent Haar-random single-site states."""
    rng = np.random.default_rng(seed)
    cos_theta = rng.uniform(-1.0, 1.0, size=L)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=L)
    theta = np.arccos(cos_theta)
    sites = [
        np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)])
        for th, ph in zip(theta, phi)
    ]
    return product_state(sites)
