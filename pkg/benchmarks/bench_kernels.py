"""Compare the pure-Python and Cython kernels.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import random
import timeit

from fpg import kernels
from fpg.presentations import FinitePresentation

BI = FinitePresentation.parse("ab", ["a^5 = b^3", "b^3 = (ba)^2"])
A5 = FinitePresentation.parse("ab", ["a^2", "b^3", "(ab)^5"])


def cases():
    rng = random.Random(0)
    words = [[rng.choice([1, -1]) * rng.randrange(1, 4) for _ in range(2000)] for _ in range(50)]
    rows = [[rng.randint(-9, 9) for _ in range(400)] for _ in range(60)]

    def free_reduce(k):
        for w in words:
            k.free_reduce(w)

    def sub_multiple(k):
        t = list(rows[0])
        for r in rows[1:]:
            k.sub_multiple(t, r, 3)

    def coset(p, strategy):
        rels = [list(r.codes) for r in p.relators]
        return lambda k: k.coset_enumerate(p.rank, rels, 100_000, strategy)

    return {
        "coset_enumerate BI hlt": coset(BI, "hlt"),
        "coset_enumerate BI felsch": coset(BI, "felsch"),
        "coset_enumerate A5 hlt": coset(A5, "hlt"),
        "free_reduce 50x2000": free_reduce,
        "sub_multiple 60x400": sub_multiple,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    names = kernels.available()
    impls = {n: kernels.get(n) for n in names}
    print(f"{'case':28s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases().items():
        times = {n: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for n, k in impls.items()}
        line = f"{label:28s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if len(names) > 1:
            line += f"{times['python'] / times['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
