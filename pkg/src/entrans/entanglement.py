"""Schmidt decomposition across the cut after site ``L_A`` and derived observables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ContractError

DEGENERACY_TOL = 1e-8


@dataclass
class SchmidtDecomposition:
    """Schmidt spectrum at one time.

    ``values`` holds the full spectrum (descending, sums to one); ``vectors``
    holds only the leading ``keep`` subsystem-A vectors as columns.
    """

    values: np.ndarray
    vectors: np.ndarray
    parities: np.ndarray
    t: float = 0.0

    @property
    def gap(self) -> float:
        return float(self.values[0] - self.values[1]) if len(self.values) > 1 else float(self.values[0])

    @property
    def entanglement_energies(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return -np.log(self.values)


@dataclass
class EntanglementRecord:
    t: float
    lambda0: float
    lambda1: float
    schmidt_gap: float
    s_vn: float
    s_min: float
    renyi: dict = field(default_factory=dict)
    echo_sq: float = 1.0
    parity0: float = 1.0
    parity1: float = -1.0
    m_a: float = 0.0
    lambda2: float = 0.0


def parity_expectation(vector: np.ndarray, L_A: int | None = None) -> float:
    """``<v| prod_{i in A} sigma^x_i |v>``.

    Flipping every bit maps index ``a`` to ``2**L_A - 1 - a``, i.e. reverses
    the amplitude order.
    """
    if L_A is not None and len(vector) != 1 << L_A:
        raise ContractError(f"vector length {len(vector)} != 2**{L_A}")
    return float(np.vdot(vector, vector[::-1]).real)


def _parity_resolve(U: np.ndarray, cols: slice) -> None:
    """Rotate the columns ``cols`` of U in place to diagonalize P_A on their span."""
    block = U[:, cols]
    P = block.conj().T @ block[::-1]
    P = 0.5 * (P + P.conj().T)
    evals, evecs = np.linalg.eigh(P)
    order = np.argsort(-evals, kind="stable")
    U[:, cols] = block @ evecs[:, order]


def _left_svd(M):
    """Singular values and left vectors via QR first (same accuracy, cheaper)."""
    rows, cols = M.shape
    if rows <= cols:
        R = np.linalg.qr(M.conj().T, mode="r")
        U, s, _ = np.linalg.svd(R.conj().T)
        return U, s
    Q, R = np.linalg.qr(M)
    Ur, s, _ = np.linalg.svd(R)
    return Q @ Ur, s


def schmidt(state: np.ndarray, L_A: int, keep: int = 2, t: float = 0.0,
            degeneracy_tol: float = DEGENERACY_TOL) -> SchmidtDecomposition:
    """SVD of the ``2**L_A x 2**(L - L_A)`` amplitude matrix.

    Within a near-degenerate cluster (consecutive gaps below
    ``degeneracy_tol``) touching the retained vectors, the vectors are rotated
    into parity eigenstates so their labels are meaningful at crossings.
    """
    n = len(state)
    L = n.bit_length() - 1
    if n != 1 << L:
        raise ContractError("state length must be a power of two")
    if not 1 <= L_A <= L - 1:
        raise ContractError(f"L_A must be in [1, {L - 1}], got {L_A}")
    U, s = _left_svd(np.asarray(state).reshape(1 << L_A, 1 << (L - L_A)))
    values = s * s
    keep = min(keep, len(values))
    start = 0
    while start < keep:
        stop = start + 1
        while stop < len(values) and values[stop - 1] - values[stop] < degeneracy_tol:
            stop += 1
        if stop - start > 1:
            _parity_resolve(U, slice(start, stop))
        start = stop
    vectors = np.ascontiguousarray(U[:, :keep])
    parities = np.array([parity_expectation(vectors[:, i]) for i in range(keep)])
    return SchmidtDecomposition(values, vectors, parities, t)


def entropies(decomp_or_values, orders=(2,)) -> dict:
    """Renyi entropies for ``orders`` plus ``"vn"`` and ``"min"``.

    Order 1 is the von Neumann limit and ``inf`` the min-entropy.
    """
    lam = decomp_or_values.values if isinstance(decomp_or_values, SchmidtDecomposition) \
        else np.asarray(decomp_or_values, dtype=float)
    pos = lam[lam > 0]
    s_vn = float(max(0.0, -np.sum(pos * np.log(pos))))
    s_min = float(-math.log(lam[0]))
    out = {"vn": s_vn, "min": s_min}
    for n in orders:
        if n == 1:
            out[n] = s_vn
        elif math.isinf(n):
            out[n] = s_min
        else:
            if n <= 0:
                raise ContractError("Renyi order must be positive")
            out[n] = float(math.log(np.sum(pos**n)) / (1.0 - n))
    return out


def entanglement_echo(reference: np.ndarray, current: np.ndarray) -> float:
    """``|<lambda_0(0)|lambda_0(t)>|^2`` (phase-independent)."""
    if np.shape(reference) != np.shape(current):
        raise ContractError(f"dimension mismatch {np.shape(reference)} vs {np.shape(current)}")
    return float(abs(np.vdot(reference, current)) ** 2)


def subsystem_magnetization(state: np.ndarray, L_A: int) -> float:
    """``(1/L_A) sum_{i in A} <sigma^z_i>`` from the subsystem-A populations."""
    n = len(state)
    L = n.bit_length() - 1
    M = np.asarray(state).reshape(1 << L_A, 1 << (L - L_A))
    pops = np.einsum("ij,ij->i", M.conj(), M).real
    a = np.arange(1 << L_A)
    zsum = np.zeros(1 << L_A)
    for bit in range(L_A):
        zsum += 1.0 - 2.0 * ((a >> bit) & 1)
    return float(pops @ zsum / L_A)


class EntanglementTracker:
    """Observer producing one :class:`EntanglementRecord` per call.

    The echo reference is the dominant Schmidt vector at the first call and is
    never re-based.
    """

    def __init__(self, L_A: int, renyi_orders=(2,), keep: int = 2):
        self.L_A = L_A
        self.renyi_orders = tuple(renyi_orders)
        self.keep = max(2, keep)
        self.reference = None
        self.records: list[EntanglementRecord] = []
        self.value_sums: list[float] = []

    def __call__(self, t: float, state: np.ndarray) -> EntanglementRecord:
        d = schmidt(state, self.L_A, keep=self.keep, t=t)
        if self.reference is None:
            self.reference = d.vectors[:, 0].copy()
        ent = entropies(d, self.renyi_orders)
        rec = EntanglementRecord(
            t=t,
            lambda0=float(d.values[0]),
            lambda1=float(d.values[1]) if len(d.values) > 1 else 0.0,
            schmidt_gap=d.gap,
            s_vn=ent["vn"],
            s_min=ent["min"],
            renyi={n: ent[n] for n in self.renyi_orders},
            echo_sq=entanglement_echo(self.reference, d.vectors[:, 0]),
            parity0=float(d.parities[0]),
            parity1=float(d.parities[1]),
            m_a=subsystem_magnetization(state, self.L_A),
            lambda2=float(d.values[2]) if len(d.values) > 2 else 0.0,
        )
        self.records.append(rec)
        self.value_sums.append(float(np.sum(d.values)))
        return rec
