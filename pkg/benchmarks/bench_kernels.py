"""Time the compiled and pure-Python kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--n 64000] [--repeat 5] [--study]

Also checks that both backends return the same numbers. ``--study`` times a
reduced Study-S1 run end to end under each backend.
"""
import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from fracvar import _pykernels

try:
    from fracvar import _ckernels
except ImportError:
    _ckernels = None


def cases(n):
    rng = np.random.default_rng(0)
    noise = rng.standard_normal(n) * n ** -0.7
    dt = 1.0 / n
    pk = _pykernels
    return {
        "euler sine (stride 8)": lambda k: k.euler_registry(pk.DRIFT_SINE, 0.0, 0.0, 1.0, dt, noise, 8),
        "euler tanh (stride 1)": lambda k: k.euler_registry(pk.DRIFT_TANH, 2.0, 0.1, 1.0, dt, noise, 1),
        "euler zero (stride 1)": lambda k: k.euler_registry(pk.DRIFT_ZERO, 0.0, 0.0, 1.0, dt, noise, 1),
        "euler constant (stride 4)": lambda k: k.euler_registry(pk.DRIFT_CONSTANT, 0.5, 0.0, 1.0, dt, noise, 4),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--study", action="store_true", help="also time a reduced study per backend")
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled extension not built; timing the Python fallback only")
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<30} " + " ".join(f"{name:>12}" for name, _ in backends) + "   speed-up  agree")
    for label, fn in cases(args.n).items():
        times, outs = [], []
        for _, mod in backends:
            outs.append(fn(mod))
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
        agree = ""
        if len(outs) == 2:
            (a, bad_a), (b, bad_b) = outs
            agree = "bitwise" if np.array_equal(a, b) and bad_a == bad_b else "DIFFER"
        speed = f"{times[0] / times[1]:9.1f}x" if len(times) == 2 else ""
        print(f"{label:<30} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times) + f" {speed}  {agree}")

    if args.study:
        study_timing()


def study_timing(reps=20):
    cmd = [sys.executable, "-m", "fracvar.cli", "study", "--setting", "Study-S1", "--reps", str(reps)]
    outputs = {}
    for name, flag in (("cython", "0"), ("python", "1")):
        t0 = time.perf_counter()
        res = subprocess.run(cmd, env=dict(os.environ, FRACVAR_PURE_PYTHON=flag),
                             capture_output=True, text=True, check=True)
        outputs[name] = res.stdout
        print(f"Study-S1, {reps} reps, {name:>6} backend: {time.perf_counter() - t0:6.2f}s")
    print("tables identical:", outputs["cython"] == outputs["python"])


if __name__ == "__main__":
    main()
