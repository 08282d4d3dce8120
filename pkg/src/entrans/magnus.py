"""Lock-step comparison of exact driven and effective high-frequency evolution."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .entanglement import entropies, schmidt
from .model import ChainSpec, ContractError, Kind
from .propagator import EvolutionConfig, Propagator, fidelity


@dataclass
class ComparisonRecord:
    t: float
    s_vn_exact: float
    s_vn_eff: float
    gap_exact: float
    gap_eff: float
    fidelity: float

    def row(self):
        return (self.t, self.s_vn_exact, self.s_vn_eff, self.gap_exact, self.gap_eff, self.fidelity)


def _same_grid(a: EvolutionConfig, b: EvolutionConfig) -> bool:
    return a.dt == b.dt and a.t_max == b.t_max and a.record_stride == b.record_stride


def _observe(state, L_A):
    d = schmidt(state, L_A, keep=2)
    return entropies(d, ())["vn"], d.gap


def compare(spec: ChainSpec, config_exact: EvolutionConfig, config_eff: EvolutionConfig,
            initial: np.ndarray, observers=(None, None)) -> list[ComparisonRecord]:
    """Evolve one initial state under both Hamiltonians on a shared grid.

    ``config_eff`` must use the effective kind; both configs must agree on
    ``dt``, ``t_max`` and ``record_stride``.  The states are compared at
    every recorded time.  ``observers`` optionally receives ``(t, state)``
    callbacks for the exact and effective evolution respectively.
    """
    if not _same_grid(config_exact, config_eff):
        raise ContractError(
            "exact and effective configs must share dt, t_max and record_stride; got "
            f"({config_exact.dt}, {config_exact.t_max}, {config_exact.record_stride}) vs "
            f"({config_eff.dt}, {config_eff.t_max}, {config_eff.record_stride})"
        )
    if config_eff.hamiltonian.kind is not Kind.EFFECTIVE:
        raise ContractError("config_eff must evolve under the effective Hamiltonian")
    psi0 = np.array(initial, dtype=np.complex128)
    if psi0.shape != (spec.dim,) or abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ContractError("initial state must be a normalized vector of the chain's dimension")
    exact, eff = Propagator(spec, config_exact), Propagator(spec, config_eff)
    records = []

    def record(t, a, b):
        s_a, g_a = _observe(a, spec.L_A)
        s_b, g_b = _observe(b, spec.L_A)
        # both evolutions start from the same vector, so F(0) = 1 by construction
        f = 1.0 if a is b else min(1.0, fidelity(a, b))
        records.append(ComparisonRecord(t, s_a, s_b, g_a, g_b, f))
        for obs, psi in zip(observers, (a, b)):
            if obs is not None:
                obs(t, psi)

    record(0.0, psi0, psi0)
    a, b = psi0, psi0
    dt, stride = config_exact.dt, config_exact.record_stride
    for k in range(config_exact.n_steps):
        a = exact.step(a, k * dt)
        b = eff.step(b, k * dt)
        if (k + 1) % stride == 0:
            record((k + 1) * dt, a, b)
    return records


def min_fidelity(records) -> float:
    return min(r.fidelity for r in records)


def fidelity_deficit(records) -> float:
    """Summed ``1 - F`` over the records."""
    return float(sum(1.0 - r.fidelity for r in records))


@dataclass
class Agreement:
    deltas: list
    n_exact: int
    n_eff: int
    count_mismatch: bool

    def to_dict(self):
        return asdict(self)


def transition_time_agreement(events_exact, events_eff) -> Agreement:
    """``|t_c(exact) - t_c(eff)|`` paired by ordinal.

    Unequal event counts are reported, and only the common prefix is paired.
    """
    if not events_exact or not events_eff:
        raise ContractError("both event lists must be nonempty")
    deltas = [abs(a.t_c - b.t_c) for a, b in zip(events_exact, events_eff)]
    return Agreement(deltas, len(events_exact), len(events_eff),
                     len(events_exact) != len(events_eff))
