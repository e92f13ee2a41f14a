"""Compare the compiled kernels against the scipy fallback.

Run ``python3 benchmarks/bench_kernels.py``.  Each kernel is timed on the
same random masks with both backends, results are checked to agree, and an
end-to-end reproduction is timed in a subprocess with the fallback forced.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np
from scipy import ndimage

from dtmint import kernels


def masks(n, seed):
    rng = np.random.default_rng(seed)
    noise = ndimage.gaussian_filter(rng.standard_normal((n, n)), 2.0)
    sparse = rng.random((n, n)) < 0.45
    return {"blobs": noise > 0, "sparse": sparse}


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(sizes, repeat):
    if "cython" not in kernels.BACKENDS:
        print("compiled kernels not available; only the fallback can be timed")
    rows = []
    for n in sizes:
        for kind, m in masks(n, n).items():
            src = np.zeros_like(m)
            src[n // 2, n // 2] = True
            for name, impl in sorted(kernels.BACKENDS.items()):
                t_lab = bench(lambda: kernels.label(m, 4, impl=impl), repeat)
                t_geo = bench(lambda: kernels.geodesic_distance(src, m | src, 8, impl=impl), repeat)
                rows.append((n, kind, name, t_lab, t_geo))
            if len(kernels.BACKENDS) == 2:
                a = kernels.label(m, 8, impl=kernels.BACKENDS["cython"])
                b = kernels.label(m, 8, impl=kernels.BACKENDS["fallback"])
                assert a[1] == b[1], "component counts differ"
                da = kernels.geodesic_distance(src, m | src, 4, impl=kernels.BACKENDS["cython"])
                db = kernels.geodesic_distance(src, m | src, 4, impl=kernels.BACKENDS["fallback"])
                assert np.array_equal(da, db), "distances differ"
    print(f"{'size':>6} {'mask':>7} {'backend':>9} {'label ms':>9} {'geodesic ms':>12}")
    for n, kind, name, t1, t2 in rows:
        print(f"{n:>6} {kind:>7} {name:>9} {t1 * 1e3:9.2f} {t2 * 1e3:12.2f}")


def end_to_end(name, resolution):
    code = (
        "import time; from dtmint.suites import reproduce; "
        f"t=time.perf_counter(); r=reproduce({name!r}, {resolution!r}); "
        "from dtmint.kernels import BACKEND; print(BACKEND, r.passed, round(time.perf_counter()-t, 3))"
    )
    for forced in ("0", "1"):
        env = dict(os.environ, DTMINT_PURE_PYTHON=forced)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, passed, secs = out.stdout.split()
        print(f"reproduce {name} ({backend}): {secs} s, pass={passed}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--example", default="example32b", help="reproduction timed end to end ('' to skip)")
    ap.add_argument("--resolution", type=int, default=None)
    args = ap.parse_args(argv)
    kernel_table(args.sizes, args.repeat)
    if args.example:
        end_to_end(args.example, args.resolution)


if __name__ == "__main__":
    main()
