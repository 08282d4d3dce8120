"""Detection of temporal entanglement transitions in recorded series."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .series import TimeSeries

DEFAULT_GAP_THRESHOLD = 0.05
DEFAULT_PARITY_CONFIDENCE = 0.5
DEFAULT_WINDOW = 5
SYNC_SPREAD = 0.02
_DECIMALS = 10


class SeriesError(ValueError):
    pass


@dataclass
class TransitionEvent:
    k: int
    t_c: float
    gap_at_tc: float
    parity_before: int
    parity_after: int
    echo_min_nearby: float
    kind: str
    index: int
    parity1_before: float = float("nan")
    parity1_after: float = float("nan")

    def to_dict(self):
        return asdict(self)


@dataclass
class PeriodicityReport:
    t_star: float | None
    dwell_minus: list = field(default_factory=list)
    dwell_plus: list = field(default_factory=list)
    dwells: list = field(default_factory=list)
    synchronized: bool = False
    T_c: float | None = None
    spread: float | None = None
    open_interval: float | None = None
    window_truncated: bool = False

    def to_dict(self):
        return asdict(self)


def _check_uniform(t: np.ndarray) -> None:
    if len(t) < 3:
        return
    d = np.diff(t)
    if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-9 * max(1.0, abs(d[0])):
        raise SeriesError("series must be time-ordered with a uniform stride")


def detect_events(series: TimeSeries, gap_threshold: float = DEFAULT_GAP_THRESHOLD,
                  parity_confidence: float = DEFAULT_PARITY_CONFIDENCE,
                  window: int = DEFAULT_WINDOW) -> list[TransitionEvent]:
    """Critical times from sign changes of the dominant vector's parity.

    A flip is registered when a sample with ``|parity0| >= parity_confidence``
    has the opposite sign of the last such sample.  The critical time is the
    sample with the smallest Schmidt gap within ``window`` samples of the
    first sample of the new sign; the event is kept only if that gap is at
    most ``gap_threshold``.  Kinds alternate odd/even starting at odd.
    """
    n = len(series)
    if n == 0:
        return []
    t = np.asarray(series.t, dtype=float)
    _check_uniform(t)
    p0 = np.asarray(series.parity0, dtype=float)
    p1 = np.asarray(series.parity1, dtype=float)
    gap = np.asarray(series.schmidt_gap, dtype=float)
    echo = np.asarray(series.echo_sq, dtype=float)

    events = []
    last_sign, last_idx = 0, None
    for i in range(n):
        if not abs(p0[i]) >= parity_confidence:
            continue
        sign = 1 if p0[i] > 0 else -1
        if last_sign and sign != last_sign:
            lo, hi = max(0, i - window), min(n, i + window + 1)
            j = lo + int(np.argmin(gap[lo:hi]))
            if gap[j] <= gap_threshold:
                k = len(events) + 1
                events.append(TransitionEvent(
                    k=k,
                    t_c=round(float(t[j]), 12),
                    gap_at_tc=float(gap[j]),
                    parity_before=last_sign,
                    parity_after=sign,
                    echo_min_nearby=float(np.min(echo[lo:hi])),
                    kind="odd" if k % 2 else "even",
                    index=j,
                    parity1_before=float(p1[last_idx]),
                    parity1_after=float(p1[i]),
                ))
        last_sign, last_idx = sign, i
    return events


def periodicity_report(events, t_max: float) -> PeriodicityReport:
    """Dwell times between consecutive events.

    The interval after the last event has no end inside the window and is
    reported separately as ``open_interval`` rather than as a dwell.
    """
    if not events:
        return PeriodicityReport(t_star=None)
    times = [e.t_c for e in events]
    open_interval = round(t_max - times[-1], _DECIMALS)
    report = PeriodicityReport(
        t_star=times[0],
        open_interval=open_interval,
        window_truncated=open_interval > 0,
    )
    if len(events) < 2:
        return report
    for prev, nxt in zip(events, events[1:]):
        dwell = round(nxt.t_c - prev.t_c, _DECIMALS)
        report.dwells.append(dwell)
        (report.dwell_minus if prev.parity_after < 0 else report.dwell_plus).append(dwell)
    d = np.array(report.dwells)
    mean = float(d.mean())
    report.spread = float((d.max() - d.min()) / mean)
    if len(d) >= 2 and report.spread <= SYNC_SPREAD:
        report.synchronized = True
        report.T_c = mean
    return report


@dataclass
class SmoothnessEntry:
    k: int
    t_c: float
    gap_stat: float
    m_a_stat: float
    loschmidt_stat: float
    ratio: float


def _max_second_difference(x: np.ndarray, lo: int, hi: int) -> float:
    seg = x[max(lo - 1, 0): hi + 1]
    if len(seg) < 3:
        return 0.0
    return float(np.max(np.abs(seg[2:] - 2.0 * seg[1:-1] + seg[:-2])))


def smoothness_control(series: TimeSeries, events, window: int = DEFAULT_WINDOW) -> list[SmoothnessEntry]:
    """Kink statistic of the gap against the smooth observables at each event.

    For each event the maximum absolute second difference inside
    ``[index - window, index + window]`` is computed for the Schmidt gap, the
    subsystem magnetization and the Loschmidt rate.  ``ratio`` divides the gap
    statistic by the larger of the two observable statistics.
    """
    gap = np.asarray(series.schmidt_gap, dtype=float)
    m_a = np.asarray(series.m_a, dtype=float)
    los = np.asarray(series.loschmidt_rate, dtype=float)
    out = []
    for e in events:
        lo, hi = e.index - window, e.index + window
        g = _max_second_difference(gap, lo, hi)
        m = _max_second_difference(m_a, lo, hi)
        r = _max_second_difference(los, lo, hi)
        denom = max(m, r)
        if denom > 0:
            ratio = g / denom
        else:
            ratio = float("inf") if g > 0 else 0.0
        out.append(SmoothnessEntry(e.k, e.t_c, g, m, r, ratio))
    return out


def synthesize_series(event_times, dt: float, t_max: float, slope: float = 1.0,
                      floor: float = 1e-6, ceiling: float = 0.5) -> TimeSeries:
    """Fixture series whose transitions sit exactly at ``event_times``.

    The dominant parity starts at +1 and flips at each event (the sample at
    the event time already carries the new sign); the Schmidt gap is a V of
    the given slope bottoming out at ``floor``; the echo is 1 in the +1 phase
    and 0 in the -1 phase.
    """
    n = int(round(t_max / dt)) + 1
    t = np.arange(n) * dt
    idx = [int(round(tc / dt)) for tc in event_times]
    parity = np.ones(n)
    for j in idx:
        parity[j:] *= -1.0
    gap = np.full(n, ceiling)
    for j in idx:
        gap = np.minimum(gap, floor + slope * np.abs(t - t[j]))
    echo = (parity > 0).astype(float)
    lam0 = 0.5 + 0.5 * gap
    lam1 = 0.5 - 0.5 * gap
    m_a = 0.1 * np.cos(t)
    return TimeSeries.from_columns(
        t=t, lambda0=lam0, lambda1=lam1, schmidt_gap=gap,
        s_vn=np.zeros(n), s_min=-np.log(lam0), renyi2=np.zeros(n),
        echo_sq=echo, parity0=parity, parity1=-parity, m_a=m_a,
        loschmidt_rate=0.01 * t * t,
    )
