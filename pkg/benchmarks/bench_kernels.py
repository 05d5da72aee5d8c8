"""Time the compiled kernels against the numpy fallback on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import importlib
import time

import numpy as np

from pcsp_sandwich import _pykernels
from pcsp_sandwich.structcore import orbit_ids, rotation_permutation


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def cases():
    for n, p in [(2, 5), (3, 5), (2, 7)]:
        coeffs = np.indices((p,) * p).reshape(p, -1).T.copy()
        yield f"linear_cyclic_mask n={n} p={p} ({len(coeffs)} vectors)", "linear_cyclic_mask", (coeffs, n, p, n)

    rng = np.random.default_rng(0)
    n, p = 3, 3
    tables = rng.integers(0, n, size=(200_000, n**p))
    tables[::2] = tables[::2][:, rotation_permutation(n, p)]
    yield "tables_cyclic_mask 200000 tables of 27", "tables_cyclic_mask", (tables, rotation_permutation(n, p))

    n, p = 3, 5
    T = rng.integers(0, n, size=(12, 6))
    labels, _ = orbit_ids(n, p)
    yield f"selection_orbit_scopes {len(T)}^{p} selections", "selection_orbit_scopes", (T, n, p, labels, 0, len(T) ** p)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        compiled = importlib.import_module("pcsp_sandwich._ckernels")
    except ImportError:
        compiled = None
        print("compiled extension not built; timing the numpy fallback only")

    print(f"{'kernel':58s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, name, inputs in cases():
        t_py, r_py = best_of(lambda: getattr(_pykernels, name)(*inputs), args.repeat)
        if compiled is None:
            print(f"{label:58s} {t_py:10.4f} {'-':>10s} {'-':>8s}")
            continue
        t_c, r_c = best_of(lambda: getattr(compiled, name)(*inputs), args.repeat)
        assert np.array_equal(np.asarray(r_py), np.asarray(r_c)), f"{name}: backends disagree"
        print(f"{label:58s} {t_py:10.4f} {t_c:10.4f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
