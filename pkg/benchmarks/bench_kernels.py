"""Timing comparison of the numba and numpy kernel paths.

Each hot kernel exists twice with identical semantics; this script times the
same call under both backends and prints the speedup. The first call per
backend is an untimed warmup (it also absorbs jit compilation).

    python3 benchmarks/bench_kernels.py --n 64 --repeats 5
"""
import argparse
import time

import numpy as np

from emtopo import backend
from emtopo.curves import IsoPair, Polyline, extract_intersection_curves
from emtopo.dynamics import ModelParams, equilibrium_state, hopf_initial_condition, stable_dt, step_euler
from emtopo.grid import NONPERIODIC, BoundarySpec, laplacian, make_grid
from emtopo.linking import gauss_linking


def _circle(center, plane, n, reverse=False):
    th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    if reverse:
        th = th[::-1]
    cx, cy, cz = center
    if plane == "xy":
        pts = np.stack([cx + np.cos(th), cy + np.sin(th), cz + 0 * th], axis=1)
    else:
        pts = np.stack([cx + np.cos(th), cy + 0 * th, cz + np.sin(th)], axis=1)
    return Polyline(pts, True)


def build_cases(n, segments):
    g = make_grid(5.0, n, (NONPERIODIC,) * 3)
    p = ModelParams()
    ustar, vstar = equilibrium_state(p)
    bc = BoundarySpec.all_dirichlet({"u": ustar, "v": vstar})
    state = hopf_initial_condition(g)
    dt = stable_dt(g, p)
    pair = IsoPair(-0.7, -0.35)
    c1 = _circle((0.0, 0.0, 0.0), "xy", segments)
    c2 = _circle((1.0, 0.0, 0.0), "xz", segments)
    return {
        "laplacian %d^3" % n: lambda: laplacian(state.u, bc),
        "euler step %d^3" % n: lambda: step_euler(state, p, bc, dt),
        "curve extraction %d^3" % n: lambda: extract_intersection_curves(
            state.u, state.v, pair
        ),
        "gauss linking %d segs" % segments: lambda: gauss_linking(c1, c2),
    }


def best_time(fn, repeats):
    fn()  # warmup / jit
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64, help="grid nodes per axis")
    ap.add_argument("--segments", type=int, default=1024, help="polyline segments")
    ap.add_argument("--repeats", type=int, default=5, help="timed repeats (best kept)")
    args = ap.parse_args()

    cases = build_cases(args.n, args.segments)
    names = ["numpy"] + (["numba"] if backend.HAVE_NUMBA else [])
    if not backend.HAVE_NUMBA:
        print("numba not importable; timing the numpy path only")

    width = max(len(k) for k in cases)
    header = "%-*s" % (width, "kernel") + "".join("%13s" % b for b in names)
    if len(names) == 2:
        header += "%10s" % "speedup"
    print(header)
    for label, fn in cases.items():
        times = []
        for bname in names:
            backend.use(bname)
            times.append(best_time(fn, args.repeats))
        row = "%-*s" % (width, label) + "".join("%10.1f ms" % (t * 1e3) for t in times)
        if len(times) == 2:
            row += "%9.1fx" % (times[0] / times[1])
        print(row)
    backend.use("auto")


if __name__ == "__main__":
    main()
