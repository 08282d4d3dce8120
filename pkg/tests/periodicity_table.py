"""Reference first-transition times and dwell sequences (L=24, L_A=9, J=1, h0=2).

Keyed by omega: (t*, [period 1, period 2, ...], dt, t_max).  The dt and
t_max are the simulation settings those values were produced with.
"""

TABLE = {
    0.1: (7.92, [3.46, 2.26, 1.78, 1.50, 1.33, 1.20], 0.01, 20.0),
    0.5: (2.77, [1.36, 0.96, 0.82, 0.80, 0.82, 0.87, 1.48, 5.45, 1.32, 0.88], 0.01, 20.0),
    1.0: (1.82, [0.98, 0.81, 0.95, 3.53, 0.98, 0.75], 0.01, 10.0),
    1.5: (1.46, [0.87, 0.99, 2.18, 1.92, 1.88], 0.01, 10.0),
    2.0: (1.28, [0.82, 2.20, 0.83, 2.44, 0.81], 0.01, 10.0),
    3.0: (1.11, [1.40, 0.93, 1.83, 2.01, 1.19, 1.18], 0.01, 10.0),
    4.0: (1.04, [1.79, 1.48, 1.68, 1.48, 1.67], 0.01, 10.0),
    5.0: (0.97, [1.98, 2.02, 2.14, 2.16], 0.01, 10.0),
    6.0: (0.90, [1.72, 1.79, 1.85, 1.67, 1.86], 0.01, 10.0),
    7.0: (0.85, [1.70, 1.67, 1.65, 1.67, 1.69], 0.01, 10.0),
    8.0: (0.82, [1.64, 1.64, 1.64, 1.64, 1.64], 0.01, 10.0),
    9.0: (0.80, [1.63, 1.65, 1.60, 1.62, 1.65], 0.01, 10.0),
    10.0: (0.80, [1.63, 1.59, 1.63, 1.60, 1.62], 0.01, 10.0),
    30.0: (0.79, [1.57, 1.57, 1.57, 1.58, 1.57], 0.002, 10.0),
    50.0: (0.79, [1.57, 1.57, 1.57, 1.57, 1.57], 0.002, 10.0),
    70.0: (0.79, [1.57, 1.57, 1.57, 1.57, 1.57], 0.001, 10.0),
    100.0: (0.79, [1.57, 1.57, 1.57, 1.57, 1.57], 0.001, 10.0),
}


def event_times(omega):
    t_star, periods, _, _ = TABLE[omega]
    times = [t_star]
    for p in periods:
        times.append(round(times[-1] + p, 10))
    return times


def fixture_series(omega):
    from entrans.transitions import synthesize_series

    _, _, dt, t_max = TABLE[omega]
    return synthesize_series(event_times(omega), dt, t_max)
