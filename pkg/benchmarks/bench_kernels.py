"""Compare the compiled and pure-Python stepping kernels.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat K]

Times a fixed-step RK4 run entirely inside the kernel, single adaptive
steps, and a full ``integrate`` call on the plane field.
"""
import argparse
import timeit

import numpy as np

from vortexsphere import dynamics as dyn
from vortexsphere import kernels
from vortexsphere.geometry import Params
from vortexsphere.integrator import IntegratorOptions, integrate

P = Params(1.0, 1.0)
Y_PLANE = np.array([0.7, -0.4, 0.3, 0.5])


def available():
    out = {"python": kernels.backend("python")}
    try:
        out["cython"] = kernels.backend("cython")
    except ImportError:
        pass
    return out


def bench(steps: int, repeat: int) -> list[tuple[str, str, float]]:
    rows = []
    k = kernels.KINDS["plane"]
    for name, mod in available().items():
        t = min(timeit.repeat(lambda: mod.rk4_run(k, P.R, P.Gamma, Y_PLANE, 1e-3, steps), number=1, repeat=repeat))
        rows.append(("rk4_run", name, t))
        f0 = np.asarray(mod.rhs(k, P.R, P.Gamma, Y_PLANE))
        t = min(timeit.repeat(lambda: mod.dp45_step(k, P.R, P.Gamma, Y_PLANE, f0, 1e-2), number=steps,
                              repeat=repeat))
        rows.append(("dp45_step", name, t))
        opts = IntegratorOptions(rel_tol=1e-12, abs_tol=1e-14, backend=name)
        t = min(timeit.repeat(lambda: integrate(dyn.plane_field(P), Y_PLANE, (0, 10), opts), number=1,
                              repeat=repeat))
        rows.append(("integrate", name, t))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rows = bench(args.steps, args.repeat)
    base = {task: t for task, name, t in rows if name == "python"}
    print(f"{'task':<10} {'backend':<8} {'seconds':>10} {'speedup':>8}")
    for task, name, t in rows:
        print(f"{task:<10} {name:<8} {t:>10.4f} {base[task] / t:>7.1f}x")


if __name__ == "__main__":
    main()
