"""Time the numba and numpy scan kernels on the same workloads.

    python benchmarks/bench_kernels.py [--repeat 3] [--max-len 10]
"""
import argparse
import time

from freesep import stallings
from freesep.isolation import ScanBounds, scan
from freesep.pgroups import FiniteGroup, separability_scan
from freesep.words import Alphabet, nonseparable_subgroup_generators


def best_of(fn, repeat):
    fn()  # warm-up: jit compile / cache load, table construction
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-len", type=int, default=10)
    args = ap.parse_args()

    gens = nonseparable_subgroup_generators(Alphabet(2))
    graph = stallings.build(gens, rank=2)
    x = Alphabet(2).parse("x")
    bounds = ScanBounds(args.max_len, (2, 3, 4, 5, 6))
    targets = [FiniteGroup.unitriangular(3, p) for p in (2, 3, 5)]
    targets += [FiniteGroup.cyclic(p, k) for p in (2, 3, 5) for k in (1, 2, 3)]
    targets.append(FiniteGroup.unitriangular(4, 2))

    workloads = {
        f"isolation L={args.max_len}": lambda b: len(scan(graph, bounds, backend=b).violations),
        "p-group homs": lambda b: separability_scan(gens, x, targets, backend=b).homs_separating,
    }
    print(f"{'workload':<22}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}  result")
    for name, job in workloads.items():
        t_nb, r_nb = best_of(lambda: job("numba"), args.repeat)
        t_np, r_np = best_of(lambda: job("numpy"), args.repeat)
        assert r_nb == r_np, (name, r_nb, r_np)
        print(f"{name:<22}{t_nb:>12.3f}{t_np:>12.3f}{t_np / t_nb:>9.1f}x  {r_nb}")


if __name__ == "__main__":
    main()
