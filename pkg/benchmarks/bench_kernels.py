"""Benchmark the JIT-compiled kernels against their pure-numpy twins.

The compiled names in ``ebcompose._kernels`` fall back to the ``*_py``
variants when numba is missing or ``EBCOMPOSE_DISABLE_JIT=1`` is set; both
objects are importable side by side, so one process can time the two paths
on identical inputs.  Run with ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import statistics
import time

import numpy as np

from ebcompose import _kernels, catalog, choi, criteria, linalg


def _time(fn, args, repeats):
    fn(*args)  # warmup; triggers compilation on the JIT path
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _ball_args(d=5, restarts=64, iters=100):
    T = catalog.holevo_werner(d, 0.4).map
    C4 = (T.choi - np.eye(d * d)).reshape(d, d, d, d)
    fwd = np.ascontiguousarray(C4.transpose(1, 3, 0, 2).reshape(d * d, d * d))
    adj = np.ascontiguousarray(C4.transpose(0, 2, 1, 3).conj().reshape(d * d, d * d))
    starts = criteria._reflection_starts(d, restarts, seed=0)
    return fwd, adj, starts, iters


def _kpos_args(d=4, k=2, restarts=32, iters=200):
    rng = np.random.default_rng(5)
    ops = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(2)]
    C = np.ascontiguousarray(choi.choi_from_kraus(ops, d, d).choi)
    a = np.stack([rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k)) for _ in range(restarts)])
    b = np.stack([rng.normal(size=(k, d)) + 1j * rng.normal(size=(k, d)) for _ in range(restarts)])
    return C, d, d, k, a.astype(np.complex128), b.astype(np.complex128), iters


def _pursuit_args(d=4, restarts=16, iters=60):
    rng = np.random.default_rng(7)
    R = linalg.random_hermitian(d * d, rng)
    a = np.stack([linalg.random_pure_state(d, rng) for _ in range(restarts)])
    b = np.stack([linalg.random_pure_state(d, rng) for _ in range(restarts)])
    return np.ascontiguousarray(R), d, d, a, b, iters


CASES = [
    ("ball_seesaw (d=5, 64 starts)", _kernels.ball_seesaw, _kernels._ball_seesaw_py, _ball_args()),
    ("kpos_seesaw (d=4, k=2, 32 starts)", _kernels.kpos_seesaw, _kernels._kpos_seesaw_py, _kpos_args()),
    ("pursuit_atom (4x4, 16 starts)", _kernels.pursuit_atom, _kernels._pursuit_atom_py, _pursuit_args()),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timed runs per kernel (median reported)")
    args = parser.parse_args()

    print(f"numba available: {_kernels.HAS_NUMBA}; JIT enabled: {_kernels.JIT_ENABLED}")
    if not _kernels.JIT_ENABLED:
        print("note: compiled names currently alias the numpy path, columns will match")
    header = f"{'kernel':38} {'jit (ms)':>10} {'numpy (ms)':>11} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, jit_fn, py_fn, call_args in CASES:
        t_jit = _time(jit_fn, call_args, args.repeats)
        t_py = _time(py_fn, call_args, args.repeats)
        ratio = t_py / t_jit if t_jit > 0 else float("inf")
        print(f"{label:38} {t_jit * 1e3:10.2f} {t_py * 1e3:11.2f} {ratio:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
