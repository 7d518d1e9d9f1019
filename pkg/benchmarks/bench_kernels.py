"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 3]

Times each kernel on identical inputs, checks the backends agree, and
prints a table of best-of-N wall times.
"""
import argparse
import time

import numpy as np

from bb84ent import kernels
from bb84ent.channels import Depolarizing, InterceptResend
from bb84ent.numeric import JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_TOL
from bb84ent.protocol import ProtocolConfig, eb_tables, run_entanglement_round, run_pm_round
from bb84ent.witness import threshold_scan


def _hermitian_batch(n, rng):
    a = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
    return (a + np.conj(np.swapaxes(a, 1, 2))) / 2


def cases(rng):
    mats = _hermitian_batch(20_000, rng)
    bcdf, ocdf = eb_tables(Depolarizing(0.3))
    n = 200_000
    cond = rng.integers(0, 2, n).astype(np.int64)
    ub, uo = rng.random(n), rng.random(n)
    u = rng.random(n - 1)
    return {
        "jacobi 20k 4x4": lambda: kernels.jacobi_eigvalsh_batch(
            mats, JACOBI_OFFDIAG_TOL, JACOBI_MAX_SWEEPS)[0],
        "sample 200k": lambda: kernels.sample_two_stage(cond, ub, uo, bcdf, ocdf)[1],
        "shuffle 200k": lambda: kernels.shuffle_indices(u),
        "sweep step 0.005": lambda: threshold_scan(0.005).to_csv(),
        "eb round 2n=1e5": lambda: run_entanglement_round(
            ProtocolConfig(100_000, "eb", 1), InterceptResend()),
        "pm round 1e5": lambda: run_pm_round(ProtocolConfig(100_000, "pm", 1), InterceptResend()),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b) or np.allclose(a, b, atol=1e-12)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    names = sorted(kernels.BACKENDS)
    results = {}
    for name in names:
        kernels._impl = kernels.get_backend(name)
        for label, fn in cases(np.random.default_rng(0)).items():
            results[(label, name)] = best_of(fn, args.repeat)
    kernels._impl = kernels.get_backend(kernels.BACKEND)

    print(f"{'case':<20}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}  agree")
    for label in cases(np.random.default_rng(0)):
        t = [results[(label, n)][0] for n in names]
        outs = [results[(label, n)][1] for n in names]
        speed = (f"{results[(label, 'python')][0] / results[(label, 'cython')][0]:9.1f}x"
                 if "cython" in names else f"{'-':>10}")
        agree = all(same(outs[0], o) for o in outs[1:])
        print(f"{label:<20}" + "".join(f"{x * 1e3:10.1f}ms" for x in t) + f"{speed}  {agree}")


if __name__ == "__main__":
    main()
