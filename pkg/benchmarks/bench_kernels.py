"""Timing comparison between the compiled kernels and the Python fallback.

Run as: python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is timed on a workload shaped like real training traffic
(hundreds of samples, tens of rules or neurons).  The best of N repeats
is reported per backend, plus the resulting speedup.
"""

import argparse
import timeit

import numpy as np

from contactlab import _kernels_py as kpy

try:
    from contactlab import _kernels_cy as kcy
except ImportError:
    kcy = None


def make_workloads(rng):
    n_samples, m, n = 400, 40, 18
    X = rng.normal(size=(n_samples, n))
    C = rng.normal(size=(m, n))
    S = rng.uniform(0.3, 2.0, size=(m, n))
    E = kpy.firing_exponents(X, C, S)
    W = np.exp(E - E.max(axis=1, keepdims=True))
    Wbar = W / W.sum(axis=1, keepdims=True)
    F = rng.normal(size=(n_samples, m))
    Y = (Wbar * F).sum(axis=1)
    R = rng.normal(size=n_samples)

    grid_w = rng.normal(size=(64, 4))
    som_x = rng.normal(size=(500, 4))
    epochs = 50
    orders = np.array([rng.permutation(len(som_x)) for _ in range(epochs)])
    lrs = np.geomspace(0.5, 0.01, epochs)
    radii = np.geomspace(2.0, 0.3, epochs)
    gi = np.repeat(np.arange(8), 8).astype(float)
    gj = np.tile(np.arange(8), 8).astype(float)

    Z = rng.normal(size=(600, 18))

    return [
        ("firing_exponents  (400x40x18)", lambda k: k.firing_exponents(X, C, S)),
        (
            "premise_grad_sums (400x40x18)",
            lambda k: k.premise_grad_sums(X, C, S, Wbar, F, Y, R),
        ),
        ("batch_winner      (500x64x4)", lambda k: k.batch_winner(grid_w, som_x)),
        (
            "som_train         (50 epochs)",
            lambda k: k.som_train(grid_w.copy(), som_x, orders, lrs, radii, gi, gj),
        ),
        ("subclust_potentials (600x18)", lambda k: k.subclust_potentials(Z, 6.25)),
    ]


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    workloads = make_workloads(rng)

    print(f"{'kernel':<30} {'python':>10} {'cython':>10} {'speedup':>9}")
    for name, call in workloads:
        t_py = best_time(lambda: call(kpy), args.repeat)
        if kcy is None:
            print(f"{name:<30} {t_py * 1e3:9.3f}ms {'n/a':>10} {'n/a':>9}")
            continue
        t_cy = best_time(lambda: call(kcy), args.repeat)
        print(
            f"{name:<30} {t_py * 1e3:9.3f}ms {t_cy * 1e3:9.3f}ms "
            f"{t_py / t_cy:8.2f}x"
        )
    if kcy is None:
        print("\ncompiled backend not available; built distributions include it")


if __name__ == "__main__":
    main()
