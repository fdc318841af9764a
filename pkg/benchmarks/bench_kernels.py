"""Compare the compiled and numpy ball-mass kernels.

Run ``python benchmarks/bench_kernels.py [--n 20000] [--repeat 5]``. For each
measure it times ``log_ball_measure`` over ``n`` random centres at several
radii with every available backend, and reports the worst disagreement.
"""
import argparse
import time

import numpy as np

from assouad_lp import presets
from assouad_lp.kernels import available_backends

CASES = [("assouad-sharp", {}), ("mono-sharp", {}), ("lower-sharp", {}), ("mu_p", {}),
         ("composite", {})]
RADII = (1e-2, 1e-6, 1e-12, 1e-40)


def time_backend(m, xs, backend, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = [m.log_ball_measure(xs, r, backend=backend) for r in RADII]
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    rng = np.random.default_rng(args.seed)
    print(f"backends: {', '.join(backends)}; n={args.n}, radii={len(RADII)}, best of {args.repeat}")
    print(f"{'measure':<15}" + "".join(f"{b + ' [ms]':>14}" for b in backends)
          + f"{'speedup':>10}{'max |diff|':>14}")
    for name, params in CASES:
        m = presets.build_measure(name, params)
        sup = m.support
        xs = np.sort(rng.uniform(sup.lo, sup.hi, args.n))
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = time_backend(m, xs, b, args.repeat)
        diff = 0.0
        if len(backends) == 2:
            for a, c in zip(outs["numpy"], outs["cython"]):
                ok = np.isfinite(a) & np.isfinite(c)
                if ok.any():
                    diff = max(diff, float(np.max(np.abs(a[ok] - c[ok]))))
        speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<15}" + "".join(f"{1e3 * times[b]:14.2f}" for b in backends)
              + f"{speed:10.1f}{diff:14.3g}")


if __name__ == "__main__":
    main()
