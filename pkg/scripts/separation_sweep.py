"""Histogram of the first separating N over random ICE towers on F2.

    python scripts/separation_sweep.py [--heights 1 2 3] [--pairs 50] [--n-max 16] [--seed 0]

Each tower stacks abelian extensions over short random words with cyclic
centralizer; for every sampled non-conjugate pair the scan records the
smallest N whose retraction separates the pair.
"""

import argparse
import random
import sys
import time
from collections import Counter

from serrelab.towers import AbelianExt, TowerError, build_tower, random_non_conjugate_pairs, separation_experiment
from serrelab.words import Alphabet, commutator, is_indivisible, random_word

F = Alphabet("F", ("x", "y"))


def random_tower(height: int, rng: random.Random):
    x, y = F.gens()
    exts = [AbelianExt(commutator(x, y), names=("t0",))]
    while len(exts) < height:
        w = random_word(F, rng.randint(2, 5), rng)
        if not is_indivisible(w):
            continue
        trial = exts + [AbelianExt(w, names=(f"t{len(exts)}",))]
        try:
            build_tower(F, trial)
        except (TowerError, ValueError):
            continue
        exts = trial
    return build_tower(F, exts, name=f"I{height}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--heights", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--pairs", type=int, default=50)
    ap.add_argument("--n-max", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    for h in args.heights:
        t0 = time.perf_counter()
        t = random_tower(h, rng)
        hist: Counter = Counter()
        for p, q in random_non_conjugate_pairs(t, args.pairs, rng):
            rep = separation_experiment(t, [p, q], args.n_max)
            hist[rep.minimal_n] += 1
        cells = ", ".join(f"N={n}: {c}" if n else f"exhausted: {c}" for n, c in sorted(hist.items(), key=lambda kv: kv[0] or 99))
        print(f"height {h}: {cells}  ({time.perf_counter() - t0:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
