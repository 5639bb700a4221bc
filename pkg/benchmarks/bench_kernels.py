"""Compiled vs pure-Python alternating kernel.

Times the bare kernel on random unitaries at the sweep's matrix sizes and a full
p=3, N=100 transfer with each backend. Run: ``python benchmarks/bench_kernels.py``.
"""

import argparse
import timeit

import numpy as np
from scipy.stats import unitary_group

from altunitary import alternating, kernels, models


def kernel_case(dim, M, seed=0):
    rng = np.random.default_rng(seed)
    w = np.ascontiguousarray(unitary_group.rvs(dim, random_state=rng))
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, (M - 1, dim)))
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi), w, np.ascontiguousarray(w.conj().T), phases


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled extension not built; timing the fallback only")

    print(f"{'case':<28}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for dim, M in ((2, 12), (51, 300), (101, 221), (101, 442)):
        psi, w, w_adj, ph = kernel_case(dim, M)
        t = [best_of(lambda k=kernels.get_kernel(b): k(psi.copy(), w, w_adj, ph), args.repeat)
             for b in backends]
        sp = f"{t[0] / t[-1]:>9.1f}x" if len(t) > 1 else ""
        print(f"{f'kernel dim={dim} M={M}':<28}" + "".join(f"{x * 1e3:>10.2f}ms" for x in t) + sp)

    fam, sched = models.pspin_family(100, 3), models.pspin_schedule(1)
    params = alternating.AlternatingParams(0.45243128, 353, 8)
    t = [best_of(lambda k=kernels.get_kernel(b): alternating.run_transfer(fam, sched, params, kernel=k),
                 args.repeat) for b in backends]
    sp = f"{t[0] / t[-1]:>9.1f}x" if len(t) > 1 else ""
    print(f"{'transfer p=3 N=100 L=8':<28}" + "".join(f"{x * 1e3:>10.2f}ms" for x in t) + sp)


if __name__ == "__main__":
    main()
