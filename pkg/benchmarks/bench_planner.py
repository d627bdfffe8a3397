"""Time the plan-grid kernel backends on a representative frame.

Runs both implementations on identical inputs (default 161x161 grid,
16 steps, 6 obstacles), checks they agree, and prints per-call timings.
The compiled backend is skipped when the extension is not built.
"""

import argparse
import math
import statistics
import time

import numpy as np

from critnav._kernels import _plan_py
from critnav.planner import PlannerConfig

try:
    from critnav._kernels import _plan_c
except ImportError:
    _plan_c = None


def kernel_inputs(cfg: PlannerConfig, n_boxes: int, seed: int = 13):
    rng = np.random.Generator(np.random.PCG64(seed))
    taus = (np.arange(cfg.steps) + 1) * cfg.step_duration
    centers = np.stack([6.0 * taus, 0.3 * taus], axis=1)
    boxes = np.empty((n_boxes, 8))
    boxes[:, 0] = rng.uniform(5.0, 30.0, n_boxes)
    boxes[:, 1] = rng.uniform(-8.0, 8.0, n_boxes)
    boxes[:, 2:4] = rng.uniform(-3.0, 3.0, (n_boxes, 2))
    yaws = rng.uniform(-math.pi, math.pi, n_boxes)
    boxes[:, 4] = np.cos(yaws)
    boxes[:, 5] = np.sin(yaws)
    boxes[:, 6] = rng.uniform(1.0, 4.0, n_boxes) + cfg.obstacle_inflation
    boxes[:, 7] = rng.uniform(0.5, 1.5, n_boxes) + cfg.obstacle_inflation
    return (
        cfg.grid_side, cfg.cell_size, cfg.steps, cfg.step_duration,
        centers, boxes,
        cfg.prior_weight, cfg.obstacle_cost_weight,
        cfg.softmax_temperature, cfg.prob_floor,
    )


def time_kernel(fn, args, repeats: int) -> list[float]:
    fn(*args)  # warm up
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append((time.perf_counter() - t0) * 1e3)
    return samples


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=100)
    parser.add_argument("--boxes", type=int, default=6)
    args = parser.parse_args()

    cfg = PlannerConfig()
    inputs = kernel_inputs(cfg, args.boxes)
    print(
        f"grid {cfg.grid_side}x{cfg.grid_side}, {cfg.steps} steps, "
        f"{args.boxes} boxes, {args.repeats} repeats"
    )

    results = {"numpy": time_kernel(_plan_py.plan_grids, inputs, args.repeats)}
    if _plan_c is not None:
        np.testing.assert_allclose(
            _plan_c.plan_grids(*inputs), _plan_py.plan_grids(*inputs), rtol=1e-12
        )
        results["cython"] = time_kernel(_plan_c.plan_grids, inputs, args.repeats)
    else:
        print("cython backend not built; timing numpy only")

    for name, samples in results.items():
        med = statistics.median(samples)
        print(f"{name:>7}: median {med:7.3f} ms  min {min(samples):7.3f} ms")
    if "cython" in results:
        ratio = statistics.median(results["numpy"]) / statistics.median(results["cython"])
        print(f"speedup: {ratio:.2f}x (numpy / cython, median)")


if __name__ == "__main__":
    main()
