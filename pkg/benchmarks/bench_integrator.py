"""Time the compiled and numpy RK4 backends on one controlled trajectory.

    python3 benchmarks/bench_integrator.py [--repeat 5] [--t-end 200]
"""

import argparse
import time

import numpy as np

from kuramoto_pinning import backend, dynamics
from kuramoto_pinning.generators import gen_scale_free
from kuramoto_pinning.rng import stream
from kuramoto_pinning.selection import select_controllers


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--t-end", type=float, default=dynamics.DEFAULT_T_END)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = gen_scale_free(-3.0, rng=stream(args.seed, 1))
    rng = stream(args.seed, 2)
    sys_ = dynamics.OscillatorSystem(dynamics.draw_phases(g.n_nodes, rng),
                                     dynamics.draw_frequencies(g.n_nodes, rng), dynamics.DEFAULT_COUPLING, g)
    ctl = dynamics.ControlConfig(select_controllers(g, "degree", args.m), 1.0)
    steps = int(round(args.t_end / dynamics.DEFAULT_DT))
    print(f"network N={g.n_nodes} E={g.n_edges}, M={args.m}, {steps} RK4 steps")

    results = {}
    for name in ("cython", "python"):
        try:
            kern = backend.get(name)
        except ImportError as exc:
            print(f"{name:>7}: unavailable ({exc})")
            continue
        best, traj = _best(lambda: dynamics.integrate(sys_, ctl, t_end=args.t_end, kernels=kern), args.repeat)
        results[name] = (best, traj)
        print(f"{name:>7}: {best * 1e3:9.1f} ms/trajectory  {best / steps * 1e6:7.2f} us/step")
    if len(results) == 2:
        diff = np.max(np.abs(results["cython"][1].R_series - results["python"][1].R_series))
        print(f"speedup {results['python'][0] / results['cython'][0]:.1f}x, max |dR| {diff:.2e}")


if __name__ == "__main__":
    main()
