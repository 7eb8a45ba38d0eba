"""Compare wall times of the Dirichlet solver backends.

The sine-transform backend solves the identical system as the dense
reference and the conjugate-gradient baseline; this prints median
times over repeated runs for a range of interior sizes.
"""

import argparse
import statistics
import time

import numpy as np

from ppii import DirichletProblem, PatchRegion, solve_cg, solve_direct, solve_dst
from ppii.solver import DIRECT_CAP


def random_problem(rng: np.random.Generator, n: int) -> DirichletProblem:
    region = PatchRegion(0, 0, n + 2, n + 2)
    return DirichletProblem(rng.standard_normal((n, n)), rng.random((n + 2, n + 2)), region)


def median_time(solver, prob, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        solver(prob)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128, 256])
    parser.add_argument("--reps", type=int, default=9)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'interior':>10} {'dst':>12} {'cg (1e-6)':>12} {'direct':>12} {'cg/dst':>8}")
    for n in args.sizes:
        prob = random_problem(rng, n)
        t_dst = median_time(solve_dst, prob, args.reps)
        t_cg = median_time(solve_cg, prob, args.reps)
        if n <= min(DIRECT_CAP):
            t_direct = f"{median_time(solve_direct, prob, args.reps) * 1e3:10.2f}ms"
        else:
            t_direct = "over cap"
        print(
            f"{n:>5}x{n:<4} {t_dst * 1e3:10.2f}ms {t_cg * 1e3:10.2f}ms "
            f"{t_direct:>12} {t_cg / t_dst:7.1f}x"
        )


if __name__ == "__main__":
    main()
