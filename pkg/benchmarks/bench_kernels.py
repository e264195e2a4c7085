"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from ecsbell import kernels


def cases():
    rng = np.random.default_rng(0)
    p = np.ascontiguousarray(rng.uniform(-1, 1, 8))
    g0 = np.zeros(76, dtype=complex)
    g0[:40] = rng.normal(size=40)
    g0 /= np.linalg.norm(g0)
    e0 = np.zeros_like(g0)
    ts = np.linspace(0.0, 10.39, 200)
    return {
        "bw_signal (optimizer objective)": (lambda k: k.bw_signal(p, 1.1, 1.1, 0.0), 2000),
        "displacement_matrix dim=116": (lambda k: k.displacement_matrix(116, 3.0 - 1.0j), 20),
        "rk4_dispersive dim=76, 200 outputs": (lambda k: k.rk4_dispersive(g0, e0, 1.0, 0.2, 0.4536, ts, 0.01), 1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'kernel':40s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup")
    for name, (fn, number) in cases().items():
        times = []
        for b in backends:
            mod = kernels.get_backend(b)
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(best)
        speed = f"{times[-1] / times[0]:8.1f}x" if len(times) == 2 else "      n/a"
        print(f"{name:40s}" + "".join(f"{t * 1e6:12.1f}us" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
