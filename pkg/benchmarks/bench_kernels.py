"""Compiled vs numpy kernel: time one static-Hamiltonian application.

    python3 benchmarks/bench_kernels.py [L ...]
"""
import sys
import timeit

import numpy as np

from entrans import kernels
from entrans.model import ChainSpec, effective_terms, static_terms


def bench(fn, terms, psi, out, number):
    args = (psi.view(np.float64).reshape(-1, 2), terms.diag, terms.masks, terms.smasks, terms.coefs,
            out.view(np.float64).reshape(-1, 2))
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=5)) / number


def main(sizes):
    if kernels.BACKEND != "cython":
        print("compiled kernel not available; only the numpy fallback will be timed")
    rng = np.random.default_rng(0)
    print(f"{'L':>3} {'kind':>9} {'cython ms':>10} {'numpy ms':>10} {'speedup':>8} {'identical':>9}")
    for L in sizes:
        psi = rng.standard_normal(1 << L) + 1j * rng.standard_normal(1 << L)
        psi /= np.linalg.norm(psi)
        number = max(1, 2 ** (20 - L))
        for kind, terms in (("static", static_terms(ChainSpec(L, 1))),
                            ("effective", effective_terms(ChainSpec(L, 1, omega=10.0)))):
            a, b = np.empty_like(psi), np.empty_like(psi)
            tp = bench(kernels.python_apply_terms, terms, psi, b, number)
            if kernels.BACKEND == "cython":
                tc = bench(kernels.apply_terms, terms, psi, a, number)
                same = np.array_equal(a, b)
                print(f"{L:>3} {kind:>9} {tc * 1e3:>10.3f} {tp * 1e3:>10.3f} {tp / tc:>8.1f} {str(same):>9}")
            else:
                print(f"{L:>3} {kind:>9} {'-':>10} {tp * 1e3:>10.3f} {'-':>8} {'-':>9}")


if __name__ == "__main__":
    main([int(x) for x in sys.argv[1:]] or [10, 14, 16, 18])
